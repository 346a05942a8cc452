use thiserror::Error;

/// Errors raised by the certification pipeline.
///
/// Numerical zeros and indeterminate verdicts are values, not errors; this
/// enum only covers malformed input and routines that could not run.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid tensor index: {0}")]
    InvalidIndex(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("tensor dimension {dim} exceeds the size cap {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("matrix {index} is not safely diagonalizable: eigenvalue gap {gap:.3e} <= {tol:.3e}")]
    NonDiagonalizable { index: usize, gap: f64, tol: f64 },
    #[error("generation failed: {0}")]
    GenerationFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
