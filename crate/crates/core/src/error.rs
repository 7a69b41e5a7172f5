use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("epsilon must lie in the open interval (0, 1/2), got {0}")]
    EpsilonOutOfRange(f64),

    #[error("rho must lie in [0, 1], got {0}")]
    RhoOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coefficient count {required} exceeds the configured cap {cap}")]
    CoefficientCap { required: u128, cap: u128 },

    #[error("sample budget exceeded: {required} samples required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("thickening estimate requires a signed distance, unavailable for {0}")]
    NoSignedDistance(String),

    #[error("no exact coefficient path for {0}; exact checks are limited to 1-D halfspaces, intervals and their rotations")]
    NoExactPath(String),

    #[error("at least {min} samples are required for confidence reporting, got {n}")]
    TooFewSamples { n: u64, min: u64 },

    #[error("reference expansion tail bound {tail:e} exceeds tolerance {tolerance:e}")]
    TailTooLarge { tail: f64, tolerance: f64 },
}
