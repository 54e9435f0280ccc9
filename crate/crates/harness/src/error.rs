use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] fragstoch_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("report: {0}")]
    Report(String),
    #[error("unknown {kind} {name:?}; known: {known}")]
    Unknown { kind: &'static str, name: String, known: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
