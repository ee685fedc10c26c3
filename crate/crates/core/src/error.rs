use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("polynomial is not homogeneous of degree {expected}")]
    Inhomogeneous { expected: usize },

    #[error("degree cap {cap} is too small: {reason}")]
    CapTooSmall { cap: usize, reason: String },

    #[error("{what} = {value} is outside the supported range ({bound})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        bound: String,
    },

    /// A computation produced something the underlying theorem rules out.
    /// These are never recoverable: they mean either a bug or a false claim.
    #[error("structural check failed: {0}")]
    Falsified(String),

    #[error("rewriting did not terminate within {0} steps")]
    NonTermination(usize),
}
