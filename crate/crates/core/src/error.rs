use thiserror::Error;

/// Errors raised by distribution primitives, symbol constructors, likelihoods and fits.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} is outside the support of {family}")]
    Domain { family: &'static str, value: f64 },

    #[error("lower bound exceeds upper bound in coordinate {coord}: {lower} > {upper}")]
    Ordering { coord: usize, lower: f64, upper: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("order constraint violated: {0}")]
    Constraint(String),

    #[error("tied values: {0}")]
    Tie(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("mixed symbol types in one dataset: {0} and {1}")]
    MixedSymbols(&'static str, &'static str),

    #[error("the starting point assigns zero probability to the observed symbols")]
    ZeroLikelihoodStart,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
