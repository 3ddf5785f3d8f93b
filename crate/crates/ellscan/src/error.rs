use thiserror::Error;

/// Errors surfaced by the library. `InvalidInput` maps to CLI exit code 1,
/// `Internal` (a broken invariant, which should never happen on valid input)
/// maps to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) => 1,
            _ => 2,
        }
    }
}
