use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent {0} is outside [1, inf]")]
    InvalidExponent(f64),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("weight {index} is {value}; weights must be finite and positive")]
    InvalidWeight { index: usize, value: f64 },
    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("operands live in different lattices")]
    SpaceMismatch,
    #[error("operation needs exponent 1 or inf, got {0}")]
    UnsupportedExponent(f64),
    #[error("parameter {name} = {value} is not allowed: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("constraint norm vanishes on every sampled direction")]
    DegenerateConstraint,
    #[error("no estimator for the pair {from} -> {to}")]
    UnsupportedPair {
        from: &'static str,
        to: &'static str,
    },
    #[error("dimension {dim} exceeds the brute-force cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("tensor has a negative entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },
}

impl Error {
    /// Errors caused by an admissible input meeting an unsupported parameter
    /// combination, as opposed to malformed input.
    pub fn is_unsupported(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedExponent(_)
                | Error::InvalidParameter { .. }
                | Error::UnsupportedPair { .. }
                | Error::DimensionTooLarge { .. }
        )
    }
}
