use thiserror::Error;

/// Errors raised by constructors and operators in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid exponent {0} out of range")]
    GridRange(u32),
    #[error("grid mismatch: m={0} vs m={1}")]
    GridMismatch(u32, u32),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(String),
    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
