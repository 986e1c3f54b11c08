//! Exact rational geometry of divisorial polytopes.

pub mod divisorial;
pub mod linalg;
pub mod polytope;
pub mod symmetry;

use thiserror::Error;

pub use divisorial::{
    admissible_points, degree, special_fiber, subdivision_cells, validate, AffinePiece, Cell, Condition,
    ConditionResult, DivisorialPolytope, FiberChoice, FiberPolytope, MarkedPoint, OriginPosition, PlFunction,
    ValidationReport, Witness,
};
pub use polytope::{simplex_volume, Facet, Halfspace, LatticeColumn, Polytope, RationalPoint};
pub use symmetry::{fixed_subspace, symmetries, Symmetry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("empty polytope")]
    Empty,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("malformed divisorial polytope: {0}")]
    Malformed(String),
    #[error("condition {condition} violated: {detail}")]
    InvalidData { condition: Condition, detail: String },
    #[error("{0} is not an admissible choice of fiber")]
    Inadmissible(String),
}
