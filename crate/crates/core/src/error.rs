use thiserror::Error;

/// Errors raised by the numerical kernels and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry at position {0}")]
    NonFinite(usize),

    #[error("column {0} is the zero vector")]
    ZeroColumn(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible constraint set: {0}")]
    Infeasible(String),

    #[error("direction vector is zero")]
    ZeroDirection,

    #[error("value outside the function domain: {0}")]
    Domain(String),

    #[error("enumeration of {count} subsets exceeds the limit of {limit}; use a smaller instance")]
    TooManySubsets { count: u128, limit: u128 },

    #[error("theory constants are outside the validity regime: {0}")]
    InvalidConstants(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
