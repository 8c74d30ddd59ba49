use thiserror::Error;

use crate::coeff::CoeffRing;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AlgebraError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("coefficient {value} does not lie in {ring}")]
    CoefficientNotInRing { value: String, ring: CoeffRing },
    #[error("coefficient mode mismatch: {left} vs {right}")]
    ModeMismatch { left: CoeffRing, right: CoeffRing },
    #[error("variable count mismatch: {0} vs {1}")]
    VariableMismatch(usize, usize),
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("map is not well defined: {0}")]
    NotWellDefined(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("ring is not reduced: {0}")]
    NotReduced(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = AlgebraError> = std::result::Result<T, E>;
