use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("not ergodic: {0}")]
    NotErgodic(String),

    #[error("detailed balance violated at ({x}, {y}): residual {residual:e}")]
    DetailedBalance { x: String, y: String, residual: f64 },

    #[error("f is not in G_m(X): nonzero mean {0:e}")]
    NotZeroMean(f64),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(what: &str) -> Self {
        Error::Parse(format!("cannot parse `{what}`"))
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
