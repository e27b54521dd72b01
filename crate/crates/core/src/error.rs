use thiserror::Error;

use crate::measures::MeasureResult;

/// Errors produced by state construction, distances and measure evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace is not one (got {0})")]
    InvalidTrace(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("correlators {0:?} lie outside the Bell-diagonal tetrahedron")]
    NonPhysical([f64; 3]),

    #[error("optimizer did not converge after {} iterations (residual {:e})", .0.iterations, .0.residual)]
    NotConverged(Box<MeasureResult>),
}

pub type Result<T> = std::result::Result<T, Error>;
