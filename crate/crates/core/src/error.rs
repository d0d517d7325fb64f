use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, AcpError>;

#[derive(Debug, Error)]
pub enum AcpError {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("stopping simulation exceeded the step cap of {cap} steps")]
    StepCapExceeded { cap: u64 },

    #[error("Gram matrix is not positive definite even with jitter {jitter:e}")]
    SingularGram { jitter: f64 },

    #[error("exhaustive enumeration refused: {what} is {got}, limit is {limit}")]
    TooLarge {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl AcpError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        AcpError::Domain(msg.into())
    }
}
