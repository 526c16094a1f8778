use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("proper time {tau} outside worldline domain [{min}, {max}]")]
    OutOfDomain { tau: f64, min: f64, max: f64 },

    #[error("no light-cone intersection found: {0}")]
    NotFound(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("accuracy target {requested:e} not met (achieved {achieved:e}): {context}")]
    Accuracy {
        requested: f64,
        achieved: f64,
        context: String,
    },

    #[error("integration failed at tau = {tau}: {reason}")]
    Integration { tau: f64, reason: String },

    #[error("history horizon {horizon} too short: truncation estimate {estimate:e} exceeds {tolerance:e}")]
    Horizon {
        horizon: f64,
        estimate: f64,
        tolerance: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
