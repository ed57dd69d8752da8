use thiserror::Error;

/// Errors reported by point-set construction, discrepancy evaluation and
/// the text-format parser.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("denominator must be at least 1")]
    ZeroDenominator,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: point set has {expected} points, got {got} weights")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("point set is empty; use the weighted entry point for N = 0")]
    EmptyPointSet,

    #[error("{what} exceeds the supported range ({detail})")]
    TooLarge { what: &'static str, detail: String },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
