use thiserror::Error;

use crate::arith::Int;

/// Errors raised by the toolkit. Hypothesis violations inside checkers are
/// not errors; they surface as not-applicable verdicts instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(Int),

    #[error("{value} is not invertible modulo {modulus} (gcd {gcd})")]
    NotInvertible { value: Int, modulus: Int, gcd: Int },

    #[error("B_{index} mod {prime} is undefined: {prime} divides its denominator")]
    UndefinedResidue { index: u64, prime: u64 },

    #[error("{0}")]
    Domain(String),

    #[error("unknown checker `{0}`")]
    UnknownChecker(String),

    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
