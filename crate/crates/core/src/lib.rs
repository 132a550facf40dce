//! Adaptive blocked randomized low-rank approximation within a spectral
//! threshold, with error-bound diagnostics, singular value thresholding
//! and robust PCA.

pub mod la;
pub mod metrics;
pub mod randlr;
pub mod rpca;
pub mod synth;

pub use la::{DenseMatrix, RngStream};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("columns are not orthonormal (defect {0:e})")]
    NotOrthonormal(f64),
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
