use thiserror::Error;

/// Errors produced by every operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Ties, plateaus, duplicate weights or a zero within-group sum.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("incompatible diagrams: {left} points vs {right} points")]
    IncompatibleDiagrams { left: usize, right: usize },

    #[error("incompatible collection: {0}")]
    IncompatibleCollection(String),

    #[error("cluster has no members")]
    EmptyCluster,

    #[error("{what} would exceed the cap of {cap}")]
    ResourceLimit { what: &'static str, cap: usize },

    #[error("parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by the numbers themselves (ties, zero
    /// denominators, internal inconsistencies) rather than by malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Degenerate(_) | Error::EmptyCluster | Error::Internal(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
