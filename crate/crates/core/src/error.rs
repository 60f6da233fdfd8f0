use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("homeomorphism not injective at sample (theta = {theta}, t = {t})")]
    NotInjective { theta: f64, t: f64 },

    #[error("scale t = {0} outside (0, pi/2)")]
    ScaleOutOfRange(f64),

    #[error("step violates half-plane margin (step = {step}, Im z = {im})")]
    StepMargin { step: f64, im: f64 },

    #[error("orientation violation at ({re}, {im}): jacobian = {jacobian}")]
    OrientationViolation { re: f64, im: f64, jacobian: f64 },

    #[error("query below the near-boundary floor: Im z = {0} < 1e-6")]
    BelowFloor(f64),

    #[error("translation-commutation violated: branch-cut mismatch {0:e}")]
    BranchCut(f64),

    #[error("value {value} out of range (0, {max}] of the control function")]
    OutOfRange { value: f64, max: f64 },

    #[error("inequality not satisfiable on grid")]
    Unsatisfiable,

    #[error("curve is not simple: segments {0} and {1} intersect; increase n")]
    SelfIntersection(usize, usize),

    #[error("grid does not resolve the geometry: {0}")]
    Unresolved(String),

    #[error("points are not connected in the chosen side")]
    Disconnected,

    #[error("solver did not converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("degenerate continuum: {0}")]
    Degenerate(String),

    #[error("config error: {0}")]
    Config(String),

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
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
