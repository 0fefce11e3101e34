//! Lowest eigenpairs of `K φ = λ M φ` by shift-invert Lanczos.
//!
//! The Krylov space is built for `(K − σM)⁻¹ M` in the `M` inner product
//! with full reorthogonalization. When the wanted Ritz pairs have not
//! converged the iteration restarts from the sum of the current Ritz
//! vectors with a larger subspace.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{abs, dot, norm, sqrt};

use super::dense::symmetric_eigen;
use super::skyline::SkylineMatrix;
use super::LinalgError;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenOptions {
    /// Required relative residual `‖Kφ − λMφ‖ / ‖Kφ‖`.
    pub tolerance: f64,
    /// Number of restarts after the first Lanczos pass.
    pub max_restarts: usize,
    /// Initial Krylov dimension; `None` picks `max(2k + 20, 40)`.
    pub subspace: Option<usize>,
    /// Spectral shift σ. `K − σM` must be positive definite.
    pub shift: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_restarts: 6,
            subspace: None,
            shift: 0.0,
        }
    }
}

/// Converged eigenpairs in ascending order, vectors `M`-normalized.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    /// Krylov dimension of the final pass.
    pub subspace: usize,
}

pub fn generalized_eigen(
    k: &SkylineMatrix,
    m: &SkylineMatrix,
    n_modes: usize,
    options: &EigenOptions,
) -> Result<EigenPairs, LinalgError> {
    let n = k.dim();
    if m.dim() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: m.dim(),
        });
    }
    if n_modes == 0 || n_modes > n {
        return Err(LinalgError::InvalidModeCount {
            requested: n_modes,
            dim: n,
        });
    }
    let factor = if options.shift == 0.0 {
        k.cholesky()?
    } else {
        let mut shifted = k.clone();
        shifted.axpy(-options.shift, m);
        shifted.cholesky()?
    };

    let mut dim = options
        .subspace
        .unwrap_or((2 * n_modes + 20).max(40))
        .clamp(n_modes, n);
    let mut start = seed_vector(n, 0x9E37_79B9_7F4A_7C15);
    let mut last_residuals = Vec::new();

    for _pass in 0..=options.max_restarts {
        let krylov = lanczos(&factor, m, &start, dim);
        let j = krylov.alpha.len();
        let mut t = vec![0.0; j * j];
        for i in 0..j {
            t[i * j + i] = krylov.alpha[i];
            if i + 1 < j {
                t[i * j + i + 1] = krylov.beta[i];
                t[(i + 1) * j + i] = krylov.beta[i];
            }
        }
        let (theta, s) = symmetric_eigen(j, &t);
        // Largest positive θ ↔ smallest λ above the shift.
        let mut wanted: Vec<usize> = (0..j).filter(|&i| theta[i] > 0.0).collect();
        wanted.sort_by(|&a, &b| theta[b].total_cmp(&theta[a]));
        wanted.truncate(n_modes);
        if wanted.len() < n_modes {
            return Err(LinalgError::NotConverged {
                residuals: last_residuals,
            });
        }

        let mut values = Vec::with_capacity(n_modes);
        let mut vectors = Vec::with_capacity(n_modes);
        let mut residuals = Vec::with_capacity(n_modes);
        for &idx in &wanted {
            let mut y = vec![0.0; n];
            for (col, basis) in krylov.basis.iter().enumerate() {
                let c = s[col * j + idx];
                for (yi, bi) in y.iter_mut().zip(basis) {
                    *yi += c * bi;
                }
            }
            let my = m.apply(&y);
            let mass = dot(&y, &my);
            let scale = 1.0 / sqrt(mass);
            y.iter_mut().for_each(|v| *v *= scale);
            orient(&mut y);
            // The Rayleigh quotient of the Ritz vector is a sharper estimate
            // than the shifted-and-inverted Ritz value.
            let ky = k.apply(&y);
            let my = m.apply(&y);
            let lambda = dot(&y, &ky) / dot(&y, &my);
            let r: Vec<f64> = ky.iter().zip(&my).map(|(a, b)| a - lambda * b).collect();
            let denom = norm(&ky).max(f64::MIN_POSITIVE);
            residuals.push(norm(&r) / denom);
            values.push(lambda);
            vectors.push(y);
        }

        if residuals.iter().all(|r| *r < options.tolerance) {
            let mut order: Vec<usize> = (0..n_modes).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            return Ok(EigenPairs {
                values: order.iter().map(|&i| values[i]).collect(),
                vectors: order.iter().map(|&i| vectors[i].clone()).collect(),
                residuals: order.iter().map(|&i| residuals[i]).collect(),
                subspace: j,
            });
        }

        start = vec![0.0; n];
        for y in &vectors {
            for (a, b) in start.iter_mut().zip(y) {
                *a += b;
            }
        }
        // Residuals sit on a rounding floor that grows with the condition
        // number; when a larger space does not help, stop.
        let worst = residuals.iter().fold(0.0f64, |a, &r| a.max(r));
        let previous = last_residuals.iter().fold(0.0f64, |a, &r| a.max(r));
        let stalled = !last_residuals.is_empty() && worst > 0.5 * previous;
        last_residuals = residuals;
        if dim == n || stalled {
            break;
        }
        dim = (dim * 2).min(n);
    }
    Err(LinalgError::NotConverged {
        residuals: last_residuals,
    })
}

struct Krylov {
    basis: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

fn lanczos(
    factor: &super::skyline::Cholesky,
    m: &SkylineMatrix,
    start: &[f64],
    dim: usize,
) -> Krylov {
    let n = start.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut m_basis: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut alpha = Vec::with_capacity(dim);
    let mut beta: Vec<f64> = Vec::with_capacity(dim);
    let mut reseed = 1u64;

    let mut v = start.to_vec();
    let Some((v0, mv0, _)) = m_orthonormalize(m, &mut v, &basis, &m_basis) else {
        return Krylov { basis, alpha, beta };
    };
    basis.push(v0);
    m_basis.push(mv0);

    loop {
        let j = basis.len() - 1;
        let mut w = factor.solve(&m_basis[j]);
        let a = dot(&m_basis[j], &w);
        alpha.push(a);
        if basis.len() == dim {
            break;
        }
        for (wi, vi) in w.iter_mut().zip(&basis[j]) {
            *wi -= a * vi;
        }
        if j > 0 {
            let b = beta[j - 1];
            for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= b * vi;
            }
        }
        if let Some((vn, mvn, b)) = m_orthonormalize(m, &mut w, &basis, &m_basis) {
            beta.push(b);
            basis.push(vn);
            m_basis.push(mvn);
            continue;
        }
        // Invariant subspace found; continue with a fresh direction.
        let mut fresh = None;
        for _ in 0..4 {
            reseed += 1;
            let mut r = seed_vector(n, reseed.wrapping_mul(0xD1B5_4A32_D192_ED03));
            if let Some(triple) = m_orthonormalize(m, &mut r, &basis, &m_basis) {
                fresh = Some(triple);
                break;
            }
        }
        match fresh {
            Some((vn, mvn, _)) => {
                beta.push(0.0);
                basis.push(vn);
                m_basis.push(mvn);
            }
            None => break,
        }
    }
    Krylov { basis, alpha, beta }
}

/// M-orthogonalizes `w` against the basis (two passes) and normalizes it.
/// Returns the vector, its image under `M`, and its M-norm before scaling.
fn m_orthonormalize(
    m: &SkylineMatrix,
    w: &mut [f64],
    basis: &[Vec<f64>],
    m_basis: &[Vec<f64>],
) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let initial = {
        let mw = m.apply(w);
        sqrt(dot(w, &mw).max(0.0))
    };
    if !(initial > 0.0) || !initial.is_finite() {
        return None;
    }
    for _pass in 0..2 {
        for (v, mv) in basis.iter().zip(m_basis) {
            let c = dot(mv, w);
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= c * vi;
            }
        }
    }
    let mw = m.apply(w);
    let nrm = sqrt(dot(w, &mw).max(0.0));
    if !(nrm > 1e-10 * initial) {
        return None;
    }
    let v: Vec<f64> = w.iter().map(|x| x / nrm).collect();
    let mv: Vec<f64> = mw.iter().map(|x| x / nrm).collect();
    Some((v, mv, nrm))
}

/// Deterministic pseudo-random vector with entries in `[0.5, 1.5)`.
fn seed_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut state = seed | 1;
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            0.5 + (state >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect()
}

/// Flips the sign so the largest-magnitude entry is positive.
fn orient(y: &mut [f64]) {
    let mut best = 0.0;
    let mut sign = 1.0;
    for v in y.iter() {
        if abs(*v) > best {
            best = abs(*v);
            sign = if *v < 0.0 { -1.0 } else { 1.0 };
        }
    }
    if sign < 0.0 {
        y.iter_mut().for_each(|v| *v = -*v);
    }
}
