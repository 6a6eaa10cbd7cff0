use thiserror::Error;

use crate::spectral::RealField;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("coefficients are not conjugate-symmetric (max defect {defect:.3e})")]
    NotConjugateSymmetric { defect: f64 },

    /// A coefficient became NaN or infinite. The last finite state is kept
    /// so that blow-up probes can report the escape time.
    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64, last_finite: Option<Box<RealField>> },

    #[error("need at least {needed} recorded states, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("rescaling by {lambda} is incompatible with the target grid: {reason}")]
    ScaleMismatch { lambda: f64, reason: String },

    #[error("wavenumbers do not sum to zero (|sum| = {sum:.3e})")]
    OffHyperplane { sum: f64 },

    #[error("resonant denominator {value:.3e} below threshold {threshold:.3e}")]
    ResonantDenominator { value: f64, threshold: f64 },

    #[error("mode budget exceeded: {what} needs {needed}, limit {limit}")]
    BudgetExceeded { what: &'static str, needed: usize, limit: usize },

    #[error("lattice budget exceeded: {cells} cells > {limit}")]
    LatticeBudget { cells: usize, limit: usize },

    #[error("infeasible scaling plan: {0}")]
    InfeasiblePlan(String),

    #[error("rescaled data too large: ||I phi|| = {norm:.4e} > {bound:.4e}")]
    ScalingFailed { norm: f64, bound: f64 },

    #[error("bootstrap violated at unit step {step}: E_I^2 = {e2:.4e} >= {ceiling:.4e}")]
    BootstrapViolated { step: usize, e2: f64, ceiling: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("malformed trajectory record: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
