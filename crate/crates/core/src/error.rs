use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("arrow index must be >= 1, got {0}")]
    ArrowIndex(u64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("run censored: {0}")]
    Censored(String),

    #[error("row scan at site {site} exceeded the cap of {cap} arrows")]
    ScanCap { site: i64, cap: u64 },

    #[error("structural invariant violated: {0}")]
    Invariant(String),

    #[error("unsupported environment: {0}")]
    Unsupported(String),

    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
