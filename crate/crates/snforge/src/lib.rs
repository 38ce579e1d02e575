//! Command-line front end and file formats for `snforge-core`.
//!
//! - [`matfile`]: the `SNFORGE v1` matrix text format.
//! - [`output`]: line-oriented and JSON report rendering.
//! - [`parallel`]: index-ordered parallel map on a sized thread pool.
//! - [`cli`]: argument grammar and command dispatch.

pub mod cli;
pub mod matfile;
pub mod output;
pub mod parallel;
