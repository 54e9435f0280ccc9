use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("domain mismatch: {0}")]
    Domain(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
