use thiserror::Error;

/// Errors surfaced by the toolkit.
///
/// `Domain` covers precondition violations (bad parameter ranges, values
/// outside a table limit), `Resource` covers allocation/capacity failures and
/// reports the limit that would be required, and `Mode` covers requests that
/// mix exact-rational and complex-float arithmetic incompatibly.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource error: {0}")]
    Resource(String),
    #[error("mode error: {0}")]
    Mode(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
    pub fn mode(msg: impl Into<String>) -> Self {
        Error::Mode(msg.into())
    }
    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
