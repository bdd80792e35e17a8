//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh resolution must be at least 1")]
    InvalidMeshSize,

    #[error("triangle {tri} has non-positive signed area {area}")]
    DegenerateOrFlippedTriangle { tri: usize, area: f64 },

    #[error("boundary edge {edge} matches no side of the unit square")]
    UntaggedBoundaryEdge { edge: usize },

    #[error("boundary partition leaves {part} empty")]
    EmptyBoundaryPart { part: &'static str },

    #[error("quadrature degree {0} unsupported (expected 1..=10)")]
    UnsupportedQuadratureDegree(usize),

    #[error("local space constraints on triangle {tri} have rank {rank}, expected {expected}")]
    ConstraintRankDeficient {
        tri: usize,
        rank: usize,
        expected: usize,
    },

    #[error("triangle {tri} is numerically degenerate (dof matrix condition {cond:.3e})")]
    DegenerateTriangle { tri: usize, cond: f64 },

    #[error("dimension mismatch: {context} expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix is singular to working precision (pivot magnitude {pivot:.3e})")]
    SingularMatrix { pivot: f64 },

    #[error("sparse factorization failed: {0}")]
    FactorizationFailed(String),

    #[error("solve produced relative residual {residual:.3e} above {limit:.1e}")]
    ResidualTooLarge { residual: f64, limit: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix expected to be positive definite is not")]
    NotPositiveDefinite,

    #[error("time step {step} failed: {source}")]
    StepFailed { step: usize, source: Box<Error> },

    #[error("unknown manufactured case '{0}' (expected 'smooth' or 'divfree')")]
    UnknownCase(String),

    #[error("material parameter {name} = {value} out of range")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
