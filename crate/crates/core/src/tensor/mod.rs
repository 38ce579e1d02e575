//! Dense Hermitian linear algebra over labeled tensor-product spaces.

mod eigen;
mod matrix;
mod ops;
mod space;

pub use eigen::{
    eig_hermitian, eigenvalues, orthonormality_residual, psd_check, reconstruction_residual,
    schmidt_coefficients, schmidt_rank, PsdVerdict, Spectrum, PSD_REL_TOL, SCHMIDT_SV_TOL,
};
pub(crate) use eigen::psd_verdict_from_values;
pub use matrix::{DenseHermitian, Matrix, StateVector, HERMITIAN_TOL, NORM_TOL};
pub(crate) use matrix::{inner, norm};
pub use ops::{kron, partial_trace, partial_transpose, permute_factors};
pub use space::TensorSpace;
