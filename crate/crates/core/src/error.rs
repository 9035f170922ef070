use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("su(m) requires m >= 2, got m = {0}")]
    AlgebraTooSmall(usize),

    #[error("sphere parameter n must be >= 1, got {0}")]
    InvalidSphere(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{name} is not defined for n = {n}")]
    UnsupportedForN { name: String, n: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate sample: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
