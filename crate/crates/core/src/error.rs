use thiserror::Error;

/// Errors raised by the frame laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid exponent {0}: must be >= 1")]
    InvalidExponent(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("singular operator: {0}")]
    Singular(String),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
