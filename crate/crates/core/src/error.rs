use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field of order {0} exceeds the supported maximum")]
    FieldTooLarge(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("invalid field element: {0}")]
    InvalidElement(String),
    #[error("operands live in different fields")]
    ContextMismatch,
    #[error("zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("polynomial must have degree at least 1")]
    ConstantPolynomial,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("additive polynomial is not separable (a_0 = 0)")]
    NotSeparable,
    #[error("coefficients must be constant in t")]
    NonConstantCoefficients,
    #[error("divisor does not divide")]
    NotDivisible,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("search space too large: {0}")]
    SearchTooLarge(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
