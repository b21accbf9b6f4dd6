use thiserror::Error;

/// Errors raised by the algebraic and numerical layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("elements belong to different symplectic structures")]
    StructureMismatch,
    #[error("dimension must be even and positive, got {0}")]
    InvalidDimension(usize),
    #[error("theta must be positive and finite, got {0}")]
    InvalidTheta(f64),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("vector length {got} does not match dimension {dim}")]
    LengthMismatch { got: usize, dim: usize },
    #[error("element contains plane-wave terms where a polynomial is required")]
    NotPolynomial,
    #[error("polynomial degree {0} exceeds 2")]
    DegreeTooHigh(u32),
    #[error("element is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("{0}")]
    InvalidInput(String),
    #[error("{0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
