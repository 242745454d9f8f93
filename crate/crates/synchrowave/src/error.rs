//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by dataset handling, model evaluation, and training.
#[derive(Debug, Error)]
pub enum Error {
    /// A value is structurally wrong: missing pre-history, mismatched
    /// channel lengths, bad layer shape.
    #[error("structure: {0}")]
    Structure(String),

    /// A caller supplied an invalid argument (counts exceeding the event
    /// pool, empty id sets, non-positive inputs).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Measured data violates a data-level contract (non-finite samples).
    #[error("data: {0}")]
    Data(String),

    /// A numeric computation produced a non-finite value.
    #[error("numeric: {0}")]
    Numeric(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }

    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
