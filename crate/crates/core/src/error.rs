use thiserror::Error;

/// Errors raised by the numerical kernels and the experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dyadic index {j} outside [{j_min}, {j_max}]")]
    IndexOutOfRange { j: i32, j_min: i32, j_max: i32 },

    #[error("spectral support violated: {0}")]
    SupportViolation(String),

    #[error("smallness precondition violated: sup|a| = {sup_a:.6} > {limit}")]
    SmallnessViolated { sup_a: f64, limit: f64 },

    #[error("pressure iteration did not converge in {iterations} iterations (residual {residual:.3e})")]
    PressureNotConverged { iterations: usize, residual: f64 },

    #[error("density positivity lost at t = {t}: min(1 + a) = {min_one_plus_a:.6e}")]
    DensityPositivityLost { t: f64, min_one_plus_a: f64 },

    #[error("stability bound violated: {0}")]
    Stability(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("fit window rejected: {0}")]
    FitWindow(String),

    #[error("nonpositive value {value} at t = {t}")]
    NonPositiveValue { t: f64, value: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
