use std::io;

use thiserror::Error;

use crate::qdimacs::ParseDiagnostics;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The formula violates a structural invariant (unbound variable and the like).
    #[error("malformed formula: {0}")]
    Malformed(String),
    /// A documented operation precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An oracle declined to evaluate because a resource limit would be exceeded.
    #[error("oracle refused: {0}")]
    Refused(String),
    /// Something that must be impossible happened. Always a bug.
    #[error("internal invariant failure: {0}")]
    Internal(String),
    #[error("{0}")]
    Parse(#[from] ParseDiagnostics),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }

    pub fn is_refusal(&self) -> bool {
        matches!(self, Error::Refused(_))
    }
}
