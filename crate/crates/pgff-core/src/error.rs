//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by algebra operations, classifiers, and the harness.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field size p^k does not fit in u64")]
    FieldTooLarge,
    #[error("modulus must be monic of degree k with coefficients in [0, p)")]
    BadModulus,
    #[error("modulus is reducible over F_p")]
    ReducibleModulus,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation requires odd characteristic")]
    CharTwoUnsupported,
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("constant polynomial not allowed here")]
    ConstantPolynomial,
    #[error("polynomial must be monic")]
    NonMonic,
    #[error("polynomial must be squarefree")]
    NotSquarefree,
    #[error("enumeration size {needed} exceeds cap {cap}")]
    CapExceeded { needed: u128, cap: u64 },
    #[error("mismatched distribution scopes: ({0}, {1}) vs ({2}, {3})")]
    ScopeMismatch(usize, usize, usize, usize),
    #[error("norm polynomial coefficients fail to descend to the base field (conjugacy bug in probe points)")]
    NormDescentFailed,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code per the CLI contract: 2 invalid config, 3 cap exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } => 3,
            Error::Internal(_) => 1,
            _ => 2,
        }
    }
}
