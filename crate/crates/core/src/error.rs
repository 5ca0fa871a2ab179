use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field grids do not match")]
    GridMismatch,

    #[error("negative diffusion coefficient (min = {min:e})")]
    NegativeCoefficient { min: f64 },

    #[error("omega must be positive for the unregularized model (min = {min:e})")]
    DegenerateOmega { min: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-positive parameter {name} = {value}")]
    NonpositiveParameter { name: &'static str, value: f64 },

    #[error("non-positive sample (omega = {omega}, k = {k})")]
    NonpositiveSample { omega: f64, k: f64 },

    #[error("non-positive value {value} at t = {t} in fit window")]
    NonpositiveSamples { t: f64, value: f64 },

    #[error("entropy exponent delta = {0} must lie in (0, 1)")]
    BadDelta(f64),

    #[error("need at least {needed} samples in window, found {found}")]
    InsufficientSamples { needed: usize, found: usize },

    #[error("step rejected at t = {t} with dt = {dt:e}: non-finite field values")]
    StepRejected { t: f64, dt: f64 },

    #[error("Picard iteration did not converge in {iters} iterations (relative residual {residual:e})")]
    PicardDiverged { iters: usize, residual: f64 },

    #[error("implicit mode requires the regularized model")]
    NotRegularized,

    #[error("incompatible grid: {0}")]
    IncompatibleGrid(String),

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
