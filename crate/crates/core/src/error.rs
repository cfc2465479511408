use thiserror::Error;

#[derive(Debug, Error)]
pub enum HlsError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point lies on the singular set of {kernel}")]
    SingularPoint { kernel: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no admissible exponent: {0}")]
    NoAdmissibleExponent(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("malformed grid file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HlsError>;

pub(crate) fn invalid(msg: impl Into<String>) -> HlsError {
    HlsError::InvalidParameter(msg.into())
}
