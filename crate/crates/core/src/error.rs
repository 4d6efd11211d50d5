use thiserror::Error;

/// Errors raised by the kernels in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value {value} is outside the sieve range 1..={limit}")]
    OutOfRange { value: u128, limit: u64 },

    #[error("sieve limit {requested} exceeds the memory cap {cap}")]
    SieveTooLarge { requested: u64, cap: u64 },

    #[error(
        "pair enumeration needs {pairs} operations on the {side} half, above the budget of {cap}; shrink the sets"
    )]
    BudgetExceeded {
        pairs: u128,
        cap: u128,
        side: &'static str,
    },

    #[error("{0} is not squarefree; the Rademacher model vanishes there")]
    NotSquarefree(u128),

    #[error("matrix is not positive semidefinite: pivot {pivot:e} at row {row}")]
    NotPositiveSemidefinite { row: usize, pivot: f64 },

    #[error("sieve cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors caused by the caller's arguments rather than by
    /// resource limits or I/O.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_) | Error::NotSquarefree(_) | Error::OutOfRange { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
