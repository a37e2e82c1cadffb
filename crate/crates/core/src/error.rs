use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field spec: {0}")]
    InvalidField(String),
    #[error("sieve limit {0} exceeds the supported ceiling 2^40")]
    SieveCeiling(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
