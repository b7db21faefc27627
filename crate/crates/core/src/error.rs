use thiserror::Error;

/// Errors raised by the algebra, decomposition and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("scalar is a zero divisor (min spectrum modulus {min_modulus:e}, tolerance {tolerance:e})")]
    SingularScalar { min_modulus: f64, tolerance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value in input")]
    NonFinite,

    #[error("svd did not converge on a {rows}x{cols} slice")]
    SvdFailed { rows: usize, cols: usize },

    #[error("malformed tensor file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
