use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid frame geometry: {0}")]
    Geometry(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid word length {0} (supported: 2..=32 bits)")]
    WordLength(u32),

    #[error("empty signal")]
    EmptySignal,

    #[error("signal exceeds full scale: peak {0}")]
    OutOfRange(f64),

    #[error("sample {index} is not a mid-riser level for the given word length")]
    NotOnLevel { index: usize },

    #[error("invalid parameter {name}: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("reference signal is identically zero")]
    ZeroReference,

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
