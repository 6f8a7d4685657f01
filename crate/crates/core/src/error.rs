use thiserror::Error;

/// Errors produced by the numeric layers.
///
/// Verdict-like outcomes (a weaving that is not woven, a system that is not
/// an approximate frame) are reported inside result structs; these variants
/// are reserved for failed preconditions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index out of range: {0}")]
    Range(String),

    #[error("operator is not invertible: {0}")]
    NotInvertible(String),

    #[error("vectors do not form a basis: {0}")]
    NotABasis(String),

    #[error("system is not an approximate Schauder frame: {0}")]
    NotAFrame(String),

    #[error("subspaces are at distance zero (distance bound {bound:e})")]
    DistanceZero { bound: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn mismatch(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
