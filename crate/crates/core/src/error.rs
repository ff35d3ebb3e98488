use thiserror::Error;

use crate::reconstruct::GramSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("need more than {dim} points in dimension {dim}, got {got}")]
    DegenerateInput { dim: usize, got: usize },

    #[error("points are not full-dimensional: affine rank {rank} < {dim}")]
    NotFullDimensional { dim: usize, rank: usize },

    #[error("point {0} is not a vertex of the convex hull")]
    RedundantVertex(usize),

    #[error("invalid facet data: {0}")]
    InvalidFacets(String),

    #[error("origin is not in the interior")]
    OriginNotInterior,

    #[error("offset {index} is not positive ({value})")]
    NonpositiveOffset { index: usize, value: f64 },

    #[error("polyhedron is unbounded")]
    Unbounded,

    #[error("polyhedron has empty interior")]
    EmptyInterior,

    #[error("face is empty")]
    EmptyFace,

    #[error("point not interior")]
    PointNotInterior,

    #[error("inconsistent Izmestiev diagonal in row {row}: residual {residual:e}")]
    InconsistentDiagonal { row: usize, residual: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("graph mismatch: {0}")]
    GraphMismatch(String),

    #[error("precondition violated: {}", .0.join("; "))]
    PreconditionViolated(Vec<String>),

    #[error("not inscribed: {0}")]
    NotInscribed(String),

    #[error("polytopes are not combinatorially equivalent")]
    NotCombEquivalent,

    #[error("graph is disconnected")]
    DisconnectedGraph,

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("solver did not converge")]
    NotConverged(Box<GramSolution>),

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
