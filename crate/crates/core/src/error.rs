use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The input does not describe a physical state (norm, trace, Hermiticity or positivity).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A parameter or argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition of an oracle does not hold for the input.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("criterion verdict is not monotone along the curve (satisfied again at t = {recovered_at} after violation at t = {violated_at})")]
    NonMonotone { violated_at: f64, recovered_at: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
