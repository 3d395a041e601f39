use thiserror::Error;

/// Errors produced by the lattice, transform and model routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("operator must have at least {min} sites, got {got}")]
    TooShort { min: usize, got: usize },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("recursion breakdown: a[{index}] = 0")]
    RecursionBreakdown { index: usize },

    #[error("overflow at index {index}: |s| exceeds {cap:e}, use the scaled solver")]
    Overflow { index: usize, cap: f64 },

    #[error("seed not nodeless: zero entry at index {index}")]
    SeedHasNode { index: usize },

    #[error("seed residual {residual:e} exceeds tolerance {tolerance:e}")]
    SeedResidual { residual: f64, tolerance: f64 },

    #[error("q-tilde cross-check discrepancy {discrepancy:e} exceeds tolerance {tolerance:e}")]
    CrossCheck { discrepancy: f64, tolerance: f64 },

    #[error("transformed coefficients not real: imaginary part {defect:e} exceeds {tolerance:e}")]
    NotReal { defect: f64, tolerance: f64 },

    #[error("zero entry at index {index}")]
    ZeroEntry { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Schema(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
