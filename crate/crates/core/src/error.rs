use thiserror::Error;

/// Failures raised by the parametric planners and the dense oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PurifyError {
    #[error("domain error: {0}")]
    Domain(String),

    /// The bipartite recurrence cannot raise q from its starting region.
    #[error("target fidelity {target} unreachable: pair weight {q0} is at or below the 1/3 fixed point")]
    Unreachable { q0: f64, target: f64 },

    #[error("GHZ weight {q0} is at or below the distillability threshold {threshold}")]
    BelowThreshold { q0: f64, threshold: f64 },

    #[error("target not reached after {rounds} rounds (best fidelity {best_fidelity})")]
    CapExceeded { rounds: usize, best_fidelity: f64 },

    #[error("oracle needs {needed} qubits but the cap is {cap}")]
    OracleCap { needed: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, PurifyError>;

pub(crate) fn domain(msg: impl Into<String>) -> PurifyError {
    PurifyError::Domain(msg.into())
}
