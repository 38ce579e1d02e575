//! Explicit PPT states with high Schmidt number and the numerical machinery
//! to certify them.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. Everything here is a pure function of its inputs; random
//! experiments take explicit seeds and expand them into per-trial streams so
//! that results never depend on execution order.
//!
//! Module map:
//!
//! - [`tensor`]: labeled tensor-product spaces, dense Hermitian matrices,
//!   Kronecker products, partial transpose/trace, eigendecomposition and
//!   Schmidt rank.
//! - [`constructions`]: maximally entangled state, flip operator, the
//!   `X ⊗ (1 − Ω) + Y ⊗ Ω` family, zero-padding and PT-invariant lifts.
//! - [`certificates`]: positivity/PPT verdicts, Choi matrices, the positive-map
//!   detector and Schmidt-number lower/upper bounds.
//! - [`subblocks`]: principal sub-block analysis, PT-invariance bounds and
//!   randomized absolute-PPT falsification.
//! - [`ensembles`]: GUE sampling, noisy maximally mixed states and the
//!   associated Monte Carlo experiments.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod certificates;
pub mod constructions;
pub mod ensembles;
mod error;
mod scalar;
pub mod seeding;
pub mod subblocks;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64;
