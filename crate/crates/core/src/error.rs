//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// An input violated an operation's precondition. `witness` locates the violation when there is one.
    #[error("precondition violated: {message}")]
    Precondition { message: String, witness: Option<Vec<f64>> },
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    /// A body or target could not be built. `suggestion` is a translation that would fix it, if known.
    #[error("construction failed: {message}")]
    Construction {
        message: String,
        suggestion: Option<Vec<f64>>,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn precondition(msg: impl Into<String>, witness: Option<Vec<f64>>) -> Self {
        Error::Precondition {
            message: msg.into(),
            witness,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
