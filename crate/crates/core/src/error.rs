use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("|f(x)| = {value} exceeds the bound {bound}")]
    BoundExceeded { value: f64, bound: f64 },

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("direction is not a unit vector (norm {norm})")]
    NotUnitVector { norm: f64 },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("vertex cap {cap} exceeded while growing generation {generation}; sizes so far {generation_sizes:?}")]
    CapExceeded {
        cap: usize,
        generation: usize,
        generation_sizes: Vec<usize>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
