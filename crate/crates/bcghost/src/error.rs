use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("series truncated at {have}, need exponent {need}")]
    Truncation { have: i64, need: i64 },
    #[error("functional cutoff {cutoff} does not cover weight {weight}")]
    Cutoff { cutoff: i64, weight: i64 },
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("series has no invertible leading term")]
    NotInvertible,
    #[error("composition needs h(0) = 0")]
    NonzeroConstant,
    #[error("exponential does not terminate: vector field has a linear or constant part")]
    NonTerminating,
    #[error("invalid curve: {0}")]
    Curve(String),
    #[error("point {0} is not marked on this curve")]
    UnknownPoint(usize),
    #[error("no global object with the requested expansion up to pole bound {0}")]
    Infeasible(usize),
    #[error("kernel is {0}-dimensional")]
    KernelDimension(usize),
    #[error("invalid Maya data: {0}")]
    Maya(String),
    #[error("charge mismatch: {0}")]
    Charge(String),
    #[error("{0}")]
    Invalid(String),
}
