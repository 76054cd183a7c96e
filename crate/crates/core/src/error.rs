use thiserror::Error;

/// Errors raised when an operation's preconditions are violated.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range for input of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("input length must be at least 1")]
    EmptyInput,

    #[error("requested {requested} solutions but input length is {len}")]
    TooManySolutions { requested: usize, len: usize },

    #[error("invalid error probability {0}: expected 2^-N <= eps < 1")]
    InvalidEpsilon(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("size {size} exceeds cap {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("polynomial exceeds 1 in absolute value on [-1,1] (max {0})")]
    NotBounded(f64),

    #[error("truth table is not monotone")]
    NotMonotone,

    #[error("no result within a budget of {budget} queries")]
    NonTermination { budget: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
