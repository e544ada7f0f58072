use thiserror::Error;

/// Errors raised by constructors, evaluators and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An exact computation would exceed its configured work cap.
    #[error("resource limit exceeded: {what} needs {required} units but the cap is {cap}; {hint}")]
    ResourceLimit {
        what: &'static str,
        required: u128,
        cap: u128,
        hint: &'static str,
    },

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    /// A structural invariant failed to hold on a freshly built object.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
