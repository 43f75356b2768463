use thiserror::Error;

/// Failure modes shared by every limit computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input violates a documented precondition (bad interval, empty grid, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A solver, division guard or positivity check failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Richardson extrapolation was requested without the matching snapshot.
    #[error("lattice snapshot at level {0} was not recorded")]
    MissingSnapshot(usize),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
