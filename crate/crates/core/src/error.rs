use thiserror::Error;

use crate::dalg::{AlgebraTag, Unit};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("algebra tag mismatch: {0:?} vs {1:?}")]
    TagMismatch(AlgebraTag, AlgebraTag),

    #[error("{unit:?} is not a basis element of {tag:?}")]
    NotABasisElement { tag: AlgebraTag, unit: Unit },

    #[error("coefficients outside {0:?} must be zero")]
    CoefficientsOutsideAlgebra(AlgebraTag),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("generator {index} is not orthogonal (residual {residual:.3e})")]
    NonOrthogonalGenerator { index: usize, residual: f64 },

    #[error("group closure exceeded {max_order} elements")]
    OrderCapExceeded { max_order: usize },

    #[error("eigenspace refinement stalled on a subspace of dimension {dim}")]
    DegenerateSplit { dim: usize },

    #[error("commutant of an irreducible block has dimension {0}; expected 1, 2 or 4")]
    UnexpectedCommutantDim(usize),

    #[error("structure map normalization failed (residual {residual:.3e})")]
    StructureMapFailure { residual: f64 },

    #[error("vector norm {norm} differs from 1 by more than {tol:e}")]
    NotUnitVector { norm: f64, tol: f64 },

    #[error("vector does not lie in the target subspace (residual {residual:.3e})")]
    NotInSubspace { residual: f64 },

    #[error("projection onto the subspace vanishes")]
    ZeroProjection,

    #[error("input {index} is not a 2-design in its component")]
    ComponentNotDesign { index: usize },

    #[error("component {component}: multiplicity {m} exceeds dimension {n}; no 2-design orbit exists")]
    MultiplicityExceedsDimension { component: usize, n: usize, m: usize },

    #[error("no component with index {0}")]
    UnknownComponent(usize),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
