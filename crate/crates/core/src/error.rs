use thiserror::Error;

/// Errors raised by model construction, compilation and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum McoError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Requested size exceeds a hard resource guard.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    /// An iterative numerical routine failed to converge.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// Malformed textual or binary input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, McoError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(McoError::Domain(msg.into()))
}
