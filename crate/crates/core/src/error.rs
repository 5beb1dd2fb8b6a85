use crate::lattice::MultiIndex;

/// Errors shared by all modules of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(u8, u8),
    #[error("forms live on different domains")]
    DomainMismatch,
    #[error("direction set has {got} axes, expected {expected}")]
    DirectionSize { got: usize, expected: usize },
    #[error("invalid direction set: {0}")]
    InvalidDirections(String),
    #[error("lattice extents must be positive")]
    EmptyDomain,
    #[error("site {0:?} is not an interior site")]
    NotInterior(MultiIndex),
    #[error("mass parameter has no exact reciprocal in this scalar type")]
    MassNotInvertible,
    #[error("matrix with {cols} columns exceeds the dense-solver guard of {limit}")]
    SizeGuard { cols: usize, limit: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("eigensolver residual {residual:e} above target {target:e}")]
    EigenResidual { residual: f64, target: f64 },
    #[error("time extent {extent} cannot hold {steps} marching steps")]
    TimeExtent { extent: usize, steps: usize },
    #[error("initial data must live on the t=0 slice (time-like parts) and t=1 slice (space-like parts)")]
    InitialDataSupport,
    #[error("unknown operator tag `{0}`")]
    UnknownOperator(String),
    #[error("form file: {0}")]
    FormFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
