use thiserror::Error;

/// Errors raised by the quasi-distribution library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Shape or index problems: mismatched dimensions, unsupported ranks,
    /// arguments that are not half-integers.
    #[error("structural error: {0}")]
    Structural(String),

    /// A value is outside its physical or declared domain.
    #[error("validation error: {0}")]
    Validation(String),

    /// An internal identity that must hold did not (e.g. a distribution
    /// value acquired an imaginary part).
    #[error("consistency error: {0}")]
    Consistency(String),

    /// Reading or writing an exported table failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// The message without the category prefix.
    pub fn message(&self) -> &str {
        match self {
            Error::Structural(m) | Error::Validation(m) | Error::Consistency(m) | Error::Io(m) => m,
        }
    }

    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
