//! Symmetric matrices in variable-band (skyline) storage and their Cholesky
//! factorization.
//!
//! Row `i` stores the lower-triangular entries from its first structural
//! nonzero column up to the diagonal, contiguously. Fill-in during Cholesky
//! stays inside that envelope, so the factor reuses the same layout.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;

use super::LinalgError;

/// Lower envelope of a symmetric sparse matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SkylineProfile {
    first_col: Vec<usize>,
    row_start: Vec<usize>,
}

impl SkylineProfile {
    /// Builds the envelope from the first nonzero column of every row.
    ///
    /// `first_col[i]` is clamped to `i`.
    pub fn new(first_col: Vec<usize>) -> Self {
        let mut first_col = first_col;
        let mut row_start = Vec::with_capacity(first_col.len() + 1);
        let mut offset = 0;
        for (i, first) in first_col.iter_mut().enumerate() {
            if *first > i {
                *first = i;
            }
            row_start.push(offset);
            offset += i - *first + 1;
        }
        row_start.push(offset);
        Self { first_col, row_start }
    }

    /// Envelope covering every pair of indices that appears together in one
    /// of `groups` (typically the free dofs of each finite element).
    pub fn from_groups<'a, I>(n: usize, groups: I) -> Self
    where
        I: IntoIterator<Item = &'a [usize]>,
    {
        let mut first: Vec<usize> = (0..n).collect();
        for group in groups {
            let Some(&lo) = group.iter().min() else {
                continue;
            };
            for &i in group {
                if lo < first[i] {
                    first[i] = lo;
                }
            }
        }
        Self::new(first)
    }

    pub fn dim(&self) -> usize {
        self.first_col.len()
    }

    pub fn stored_entries(&self) -> usize {
        *self.row_start.last().unwrap_or(&0)
    }

    pub fn first_col(&self, row: usize) -> usize {
        self.first_col[row]
    }

    /// Largest row half-bandwidth.
    pub fn bandwidth(&self) -> usize {
        self.first_col
            .iter()
            .enumerate()
            .map(|(i, f)| i - f)
            .max()
            .unwrap_or(0)
    }

    #[inline]
    fn index(&self, row: usize, col: usize) -> Option<usize> {
        let first = self.first_col[row];
        if col < first || col > row {
            None
        } else {
            Some(self.row_start[row] + col - first)
        }
    }
}

/// Symmetric matrix stored by its lower envelope.
#[derive(Clone, Debug)]
pub struct SkylineMatrix {
    profile: SkylineProfile,
    values: Vec<f64>,
}

impl SkylineMatrix {
    pub fn zeros(profile: SkylineProfile) -> Self {
        let values = vec![0.0; profile.stored_entries()];
        Self { profile, values }
    }

    /// Dense diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let profile = SkylineProfile::new((0..diag.len()).collect());
        Self {
            profile,
            values: diag.to_vec(),
        }
    }

    /// Fully populated lower triangle built from a row-major dense matrix.
    /// Only the lower triangle of `dense` is read.
    pub fn from_dense(n: usize, dense: &[f64]) -> Self {
        assert_eq!(dense.len(), n * n, "dense matrix must be n x n");
        let profile = SkylineProfile::new(vec![0; n]);
        let mut m = Self::zeros(profile);
        for i in 0..n {
            for j in 0..=i {
                m.set(i, j, dense[i * n + j]);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.profile.dim()
    }

    pub fn profile(&self) -> &SkylineProfile {
        &self.profile
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn clear(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
    }

    /// Entry `(i, j)`; symmetric access, zero outside the envelope.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        self.profile.index(r, c).map_or(0.0, |k| self.values[k])
    }

    /// Adds `v` to entry `(i, j)` (and implicitly `(j, i)`).
    ///
    /// Panics when the entry lies outside the envelope.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let k = self
            .profile
            .index(r, c)
            .expect("entry outside skyline envelope");
        self.values[k] += v;
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let k = self
            .profile
            .index(r, c)
            .expect("entry outside skyline envelope");
        self.values[k] = v;
    }

    /// Scatters a dense element block. `dofs[a] == None` marks eliminated dofs.
    pub fn add_block(&mut self, dofs: &[Option<usize>], block: &[f64], scale: f64) {
        let n = dofs.len();
        debug_assert_eq!(block.len(), n * n);
        for a in 0..n {
            let Some(ia) = dofs[a] else { continue };
            for b in 0..n {
                let Some(ib) = dofs[b] else { continue };
                if ib <= ia {
                    self.add(ia, ib, scale * block[a * n + b]);
                }
            }
        }
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        assert_eq!(x.len(), n);
        assert_eq!(y.len(), n);
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            let first = self.profile.first_col[i];
            let row = &self.values[self.profile.row_start[i]..self.profile.row_start[i + 1]];
            let (off, diag) = row.split_at(row.len() - 1);
            let xi = x[i];
            let mut acc = diag[0] * xi;
            for (k, a) in off.iter().enumerate() {
                let j = first + k;
                acc += a * x[j];
                y[j] += a * xi;
            }
            y[i] += acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.mul_vec(x, &mut y);
        y
    }

    /// Largest `|a_ij|` over the stored envelope.
    pub fn max_abs(&self) -> f64 {
        crate::math::max_abs(&self.values)
    }

    /// In-place `self += alpha * other`; both must share the same profile.
    pub fn axpy(&mut self, alpha: f64, other: &SkylineMatrix) {
        assert_eq!(self.profile, other.profile, "profiles differ");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }

    /// Cholesky factorization `A = L Lᵀ`.
    pub fn cholesky(&self) -> Result<Cholesky, LinalgError> {
        Cholesky::factor(self)
    }
}

/// Cholesky factor stored in the envelope of the original matrix.
#[derive(Clone, Debug)]
pub struct Cholesky {
    profile: SkylineProfile,
    values: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &SkylineMatrix) -> Result<Self, LinalgError> {
        let profile = a.profile.clone();
        let mut l = a.values.clone();
        let n = profile.dim();
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..n {
            let fi = profile.first_col[i];
            let si = profile.row_start[i];
            for j in fi..i {
                let fj = profile.first_col[j];
                let sj = profile.row_start[j];
                let k0 = fi.max(fj);
                let len = j - k0;
                let (head, tail) = l.split_at_mut(si);
                let row_i = &tail[k0 - fi..k0 - fi + len];
                let row_j = &head[sj + k0 - fj..sj + k0 - fj + len];
                let mut s = 0.0;
                for (p, q) in row_i.iter().zip(row_j) {
                    s += p * q;
                }
                let ljj = head[sj + j - fj];
                let idx = j - fi;
                tail[idx] = (tail[idx] - s) / ljj;
            }
            let diag_idx = si + i - fi;
            let row = &l[si..diag_idx];
            let s: f64 = row.iter().map(|v| v * v).sum();
            let d = l[diag_idx] - s;
            if !(d > scale * 1e-300) || !d.is_finite() {
                return Err(LinalgError::NotPositiveDefinite {
                    index: i,
                    pivot: d,
                });
            }
            l[diag_idx] = sqrt(d);
        }
        Ok(Self { profile, values: l })
    }

    pub fn dim(&self) -> usize {
        self.profile.dim()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let p = &self.profile;
        for i in 0..n {
            let fi = p.first_col[i];
            let si = p.row_start[i];
            let row = &self.values[si..si + i - fi];
            let mut s = b[i];
            for (k, v) in row.iter().enumerate() {
                s -= v * b[fi + k];
            }
            b[i] = s / self.values[si + i - fi];
        }
        for i in (0..n).rev() {
            let fi = p.first_col[i];
            let si = p.row_start[i];
            let xi = b[i] / self.values[si + i - fi];
            b[i] = xi;
            let row = &self.values[si..si + i - fi];
            for (k, v) in row.iter().enumerate() {
                b[fi + k] -= v * xi;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SkylineMatrix {
        let mut first: Vec<usize> = (0..n).collect();
        for (i, f) in first.iter_mut().enumerate().skip(1) {
            *f = i - 1;
        }
        let mut a = SkylineMatrix::zeros(SkylineProfile::new(first));
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
        }
        a
    }

    #[test]
    fn solves_tridiagonal_system() {
        let a = laplacian(20);
        let x_true: Vec<f64> = (0..20).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = a.apply(&x_true);
        let x = a.cholesky().unwrap().solve(&b);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_and_variable_profile_agree() {
        // Arrow-shaped matrix: the last row couples to everything.
        let n = 6;
        let mut dense = vec![0.0; n * n];
        for i in 0..n {
            dense[i * n + i] = 10.0 + i as f64;
            dense[(n - 1) * n + i] = 1.0;
            dense[i * n + n - 1] = 1.0;
        }
        dense[(n - 1) * n + n - 1] = 20.0;
        let full = SkylineMatrix::from_dense(n, &dense);
        let mut first: Vec<usize> = (0..n).collect();
        first[n - 1] = 0;
        let mut sparse = SkylineMatrix::zeros(SkylineProfile::new(first));
        for i in 0..n {
            for j in 0..=i {
                if dense[i * n + j] != 0.0 {
                    sparse.add(i, j, dense[i * n + j]);
                }
            }
        }
        let b: Vec<f64> = (0..n).map(|i| i as f64 - 2.0).collect();
        let x1 = full.cholesky().unwrap().solve(&b);
        let x2 = sparse.cholesky().unwrap().solve(&b);
        for (u, v) in x1.iter().zip(&x2) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn indefinite_matrix_reports_pivot() {
        let mut a = laplacian(4);
        a.set(2, 2, -5.0);
        match a.cholesky() {
            Err(LinalgError::NotPositiveDefinite { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn symmetric_matvec() {
        let a = laplacian(5);
        let y = a.apply(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(y, vec![0.0, 0.0, 0.0, 0.0, 6.0]);
    }
}
