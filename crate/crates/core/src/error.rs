use thiserror::Error;

/// Errors raised by every operation in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid equation: {0}")]
    InvalidEquation(String),

    #[error("tuple has {got} entries but the equation has {expected} variables")]
    TupleLength { expected: usize, got: usize },

    #[error("duplicate element {0} in integer set")]
    DuplicateElement(String),

    #[error("brute-force oracle refused a set of {size} elements (cap is {cap})")]
    OracleCap { size: usize, cap: usize },

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search cancelled")]
    Cancelled,

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
