use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("not a projection: {0}")]
    NotProjection(String),

    #[error("eigensolver failed to converge (reconstruction residual {residual:.3e})")]
    EigenFailure { residual: f64 },

    #[error("zero matrix has no range projection")]
    ZeroMatrix,

    #[error("map is not completely positive (minimum Choi eigenvalue {min_eigenvalue:.3e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("zero trace")]
    ZeroTrace,

    #[error("unknown cone `{0}`")]
    UnknownCone(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("rejection sampling gave up after {attempts} draws (best minimum partial-transpose eigenvalue {best:.3e})")]
    RejectionCap { attempts: usize, best: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
