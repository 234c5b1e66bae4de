use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least {min}, got {found}")]
    DimensionTooSmall { min: usize, found: usize },

    #[error("antisymmetry violated at c[{i}][{j}][{k}]: {value} vs {mirror}")]
    NotAntisymmetric {
        i: usize,
        j: usize,
        k: usize,
        value: f64,
        mirror: f64,
    },

    #[error("Jacobi identity violated: residual {residual:e} exceeds {tolerance:e}")]
    JacobiViolation { residual: f64, tolerance: f64 },

    #[error("metric is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("metric is not symmetric (residual {residual:e})")]
    NotSymmetric { residual: f64 },

    #[error("plane frame is not orthonormal (residual {residual:e})")]
    NonOrthonormalPlane { residual: f64 },

    #[error("zero vector where a non-zero one is required: {0}")]
    ZeroVector(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("theorem hypothesis not satisfied: {0}")]
    HypothesisViolated(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("reductive splitting invalid: {0}")]
    InvalidSplitting(String),

    #[error("optimization diverged: {0}")]
    Divergence(String),

    #[error("integration produced a non-finite value at step {step}")]
    NonFinite { step: usize },

    #[error("coordinate model does not match the structure: {0}")]
    ModelMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
