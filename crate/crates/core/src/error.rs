//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input: violated precondition, mismatched grids, bad kernels.
    #[error("domain error: {0}")]
    Domain(String),
    /// A dimension or sparsity budget was exceeded.
    #[error("resource error: {0}")]
    Resource(String),
    /// An iterative solver failed to converge or bracket.
    #[error("solver error: {0}")]
    Solver(String),
    /// NaN/Inf or loss of precision detected mid-computation.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// Internal consistency check failed (should not happen on valid input).
    #[error("internal consistency error: {0}")]
    Internal(String),
    /// Configuration file or key rejected.
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn solver(msg: impl Into<String>) -> Self {
        Error::Solver(msg.into())
    }
}
