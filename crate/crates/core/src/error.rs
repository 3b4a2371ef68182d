use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid, solver or experiment parameters.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape mismatch: expected {expected} samples per component, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    /// Argument outside the mathematical domain of an operator (negative time, eps <= 0, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The time stepper detected a blow-up.
    #[error("solution diverged at t = {time}: L-inf norm {norm:e} exceeds cap {cap:e}")]
    Divergence { time: f64, norm: f64, cap: f64 },

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e}, {evaluations} evaluations)")]
    Quadrature {
        tol: f64,
        estimate: f64,
        evaluations: usize,
    },

    #[error("not enough samples: need {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("degenerate series: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
