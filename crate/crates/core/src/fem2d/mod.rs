//! Plane-stress finite elements on structured quad grids: meshing,
//! assembly of penalized stiffness and mass, static and generalized
//! eigenvalue solves, and centroid stress recovery.
//!
//! Clamped dofs are eliminated from the global system. All global matrices
//! and vectors returned here use the reduced numbering of [`DofMap`].

mod assembly;
mod element;
mod material;
mod mesh;
mod solve;

pub use assembly::{assemble, check_densities, pressure_load, Assembler, DofMap, MatrixKind};
pub use element::{element_matrices, plane_stress_d, ElementMatrices};
pub use material::{MassInterpolation, Material};
pub use mesh::{build_mesh, BoundarySpec, ClampSpec, Edge, PressureEdge, QuadMesh};
pub use solve::{
    element_stress, solve_eigen, solve_eigen_with, solve_static, EigenSolution, StaticSolution,
    STATIC_RESIDUAL_TOL,
};

pub(crate) use material::pow;

use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FemError {
    #[error("{what} {extent} m is not an integer multiple of the element size {element_size} m")]
    Dimension {
        what: &'static str,
        extent: f64,
        element_size: f64,
    },
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("no clamped nodes: the system would be singular")]
    NoSupports,
    #[error("invalid material: {0}")]
    InvalidMaterial(&'static str),
    #[error("expected {expected} entries, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("density {value} of element {index} is outside (0, 1]")]
    InvalidDensity { index: usize, value: f64 },
    #[error("element {0} does not exist")]
    InvalidElement(usize),
    #[error("stiffness factorization failed at reduced dof {dof} (pivot {pivot:e})")]
    Factorization { dof: usize, pivot: f64 },
    #[error("static residual {residual:e} above tolerance")]
    Residual { residual: f64 },
    #[error(transparent)]
    Eigen(LinalgError),
}

impl FemError {
    pub(crate) fn from_factorization(e: LinalgError) -> Self {
        match e {
            LinalgError::NotPositiveDefinite { index, pivot } => Self::Factorization { dof: index, pivot },
            other => Self::Eigen(other),
        }
    }
}
