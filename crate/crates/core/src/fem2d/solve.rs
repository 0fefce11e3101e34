use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{generalized_eigen, Cholesky, EigenOptions, LinalgError, SkylineMatrix};
use crate::math::{norm, sqrt};

use super::element::ElementMatrices;
use super::material::Material;
use super::mesh::QuadMesh;
use super::FemError;

/// Required relative residual of an accepted static solve.
pub const STATIC_RESIDUAL_TOL: f64 = 1e-9;

/// Displacements of a static solve together with the factorization, which
/// adjoint solves reuse.
#[derive(Clone, Debug)]
pub struct StaticSolution {
    pub u: Vec<f64>,
    pub residual: f64,
    factor: Cholesky,
}

impl StaticSolution {
    /// Solves `K λ = rhs` with the stored factorization.
    pub fn solve_adjoint(&self, rhs: &[f64]) -> Vec<f64> {
        self.factor.solve(rhs)
    }

    pub fn factor(&self) -> &Cholesky {
        &self.factor
    }
}

fn relative_residual(k: &SkylineMatrix, u: &[f64], f: &[f64], f_norm: f64) -> (Vec<f64>, f64) {
    let ku = k.apply(u);
    let r: Vec<f64> = f.iter().zip(&ku).map(|(a, b)| a - b).collect();
    let rel = norm(&r) / f_norm;
    (r, rel)
}

/// Direct solve of `K u = F`. One step of iterative refinement is applied
/// whenever the residual exceeds [`STATIC_RESIDUAL_TOL`].
pub fn solve_static(k: &SkylineMatrix, f: &[f64]) -> Result<StaticSolution, FemError> {
    if f.len() != k.dim() {
        return Err(FemError::SizeMismatch {
            expected: k.dim(),
            found: f.len(),
        });
    }
    let factor = k.cholesky().map_err(FemError::from_factorization)?;
    let f_norm = norm(f);
    if f_norm == 0.0 {
        return Ok(StaticSolution {
            u: vec![0.0; f.len()],
            residual: 0.0,
            factor,
        });
    }
    let mut u = factor.solve(f);
    let (mut r, mut rel) = relative_residual(k, &u, f, f_norm);
    let mut refinements = 0;
    while rel >= STATIC_RESIDUAL_TOL && refinements < 3 {
        let du = factor.solve(&r);
        for (a, b) in u.iter_mut().zip(&du) {
            *a += b;
        }
        (r, rel) = relative_residual(k, &u, f, f_norm);
        refinements += 1;
    }
    if !(rel < STATIC_RESIDUAL_TOL) {
        return Err(FemError::Residual { residual: rel });
    }
    Ok(StaticSolution {
        u,
        residual: rel,
        factor,
    })
}

/// Lowest eigenpairs of `K φ = λ M φ`.
#[derive(Clone, Debug)]
pub struct EigenSolution {
    /// Ascending eigenvalues (rad²/s²).
    pub eigenvalues: Vec<f64>,
    /// Mass-normalized mode shapes in reduced numbering.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `√λ / 2π` (Hz).
    pub frequencies: Vec<f64>,
    pub residuals: Vec<f64>,
}

pub fn solve_eigen(
    k: &SkylineMatrix,
    m: &SkylineMatrix,
    n_modes: usize,
) -> Result<EigenSolution, FemError> {
    solve_eigen_with(k, m, n_modes, &EigenOptions::default())
}

pub fn solve_eigen_with(
    k: &SkylineMatrix,
    m: &SkylineMatrix,
    n_modes: usize,
    options: &EigenOptions,
) -> Result<EigenSolution, FemError> {
    let pairs = generalized_eigen(k, m, n_modes, options).map_err(|e| match e {
        LinalgError::NotPositiveDefinite { .. } => FemError::from_factorization(e),
        other => FemError::Eigen(other),
    })?;
    let frequencies = pairs
        .values
        .iter()
        .map(|l| sqrt(l.max(0.0)) / (2.0 * core::f64::consts::PI))
        .collect();
    Ok(EigenSolution {
        eigenvalues: pairs.values,
        eigenvectors: pairs.vectors,
        frequencies,
        residuals: pairs.residuals,
    })
}

/// Centroid stress `(σxx, σyy, σxy)` of element `element` under the solid
/// constitutive law. `u` is the full displacement vector.
pub fn element_stress(
    mesh: &QuadMesh,
    u: &[f64],
    material: &Material,
    element: usize,
) -> Result<[f64; 3], FemError> {
    if element >= mesh.n_elements() {
        return Err(FemError::InvalidElement(element));
    }
    if u.len() != mesh.n_dofs() {
        return Err(FemError::SizeMismatch {
            expected: mesh.n_dofs(),
            found: u.len(),
        });
    }
    let em = super::element::element_matrices(material, mesh.element_size, mesh.thickness)?;
    Ok(stress_with(&em, mesh, u, element))
}

pub(crate) fn stress_with(em: &ElementMatrices, mesh: &QuadMesh, u: &[f64], e: usize) -> [f64; 3] {
    let dofs = mesh.element_dofs(e);
    let ue = dofs.map(|d| u[d]);
    em.centroid_stress(&ue)
}
