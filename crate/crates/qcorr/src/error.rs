use thiserror::Error;

/// Errors surfaced by state construction, measure evaluation and file parsing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("infeasible objective: {0}")]
    Infeasible(String),
    #[error("dimension cap exceeded: {0}")]
    DimCapExceeded(String),
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
