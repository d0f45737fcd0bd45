use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The variants are coarse on purpose: the CLI maps them onto exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("backend mismatch: {0}")]
    Backend(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("exact arithmetic unavailable: {0}")]
    Inexact(String),
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("search capacity exceeded: {0}")]
    Capacity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
