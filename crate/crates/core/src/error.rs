use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Sequences are 1-indexed.
    #[error("index must be at least 1, got {0}")]
    ZeroIndex(u64),

    #[error("invalid {name}: {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("partition index overflow encoding block {block}, position {position}")]
    IndexOverflow { block: u64, position: u64 },

    #[error("sequence `{0}` has no monotone tail")]
    NoMonotoneTail(String),

    #[error("no index with |x_j| < {epsilon} found within {evaluations} evaluations")]
    DecayNotFound { epsilon: f64, evaluations: u64 },

    #[error("coefficient sequence `{0}` has no l1 certificate")]
    NotSummable(String),

    #[error("the zero field admits solutions; no blow-up witness exists")]
    ZeroField,

    #[error("all slots of the model-vector list are zero")]
    ZeroVectorList,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain { name, value, reason }
    }
}

/// Rejects non-finite and non-positive reals.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(name, value, "must be finite and positive"))
    }
}
