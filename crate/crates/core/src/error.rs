use thiserror::Error;

pub type Result<T, E = BlockadeError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlockadeError {
    /// A parameter failed validation. `field` names the offending field.
    #[error("invalid {field}: {reason} (got {value})")]
    InvalidParameter {
        field: String,
        value: f64,
        reason: &'static str,
    },

    #[error("thermal occupation {nbar} leaves {tail:.3e} of the weight above phonon level {n_max} (limit {limit:.1e})")]
    TruncationTooSmall {
        nbar: f64,
        n_max: usize,
        tail: f64,
        limit: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite density matrix entry at t = {t}")]
    NonFinite { t: f64 },

    #[error("density matrix invariant violated at t = {t}: {what}")]
    InvariantViolated { t: f64, what: String },

    #[error("step refinement failed to converge after {halvings} halvings (last change {change:.3e}, tolerance {tolerance:.1e})")]
    StepFailure {
        halvings: usize,
        change: f64,
        tolerance: f64,
    },

    /// `⟨n⟩` or `p₁` is too small for a correlation function to be defined.
    #[error("autocorrelation undefined: {0}")]
    Undefined(&'static str),

    #[error("search space has no free parameter")]
    EmptySearchSpace,
}
