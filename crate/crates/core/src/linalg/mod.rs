//! Sparse symmetric linear algebra used by both finite-element models.

mod dense;
mod lanczos;
mod ordering;
mod skyline;

use alloc::vec::Vec;

pub use dense::symmetric_eigen;
pub use lanczos::{generalized_eigen, EigenOptions, EigenPairs};
pub use ordering::{inverse_permutation, reverse_cuthill_mckee};
pub use skyline::{Cholesky, SkylineMatrix, SkylineProfile};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite: pivot {pivot:e} at reduced dof {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cannot compute {requested} modes of a {dim}-dof system")]
    InvalidModeCount { requested: usize, dim: usize },
    #[error("eigensolver did not converge; residuals {residuals:?}")]
    NotConverged { residuals: Vec<f64> },
}
