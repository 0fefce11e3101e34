use alloc::vec;
use alloc::vec::Vec;

use crate::fem2d::QuadMesh;
use crate::math::{floor, sqrt};

use super::{check_len, TopoptError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterMode {
    /// `x̃ = W x`.
    Densities,
    /// Chain rule through the density filter, `∂f/∂x = Wᵀ ∂f/∂x̃`.
    Sensitivities,
}

/// Row-normalized hat-weight density filter stored as CSR.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterSpec {
    /// Radius in element lengths.
    pub radius: f64,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
}

impl FilterSpec {
    /// Weights `max(0, r − d)` between element centroids, `d` measured in
    /// element lengths.
    pub fn new(mesh: &QuadMesh, radius: f64) -> Result<Self, TopoptError> {
        Self::build(mesh, radius, None)
    }

    /// Like [`FilterSpec::new`], but active elements map to themselves and
    /// are left out of the neighbourhoods of design elements, so frozen
    /// faces do not bleed into the core.
    pub fn with_mask(mesh: &QuadMesh, radius: f64, active: &[bool]) -> Result<Self, TopoptError> {
        check_len(mesh.n_elements(), active.len())?;
        Self::build(mesh, radius, Some(active))
    }

    fn build(mesh: &QuadMesh, radius: f64, active: Option<&[bool]>) -> Result<Self, TopoptError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(TopoptError::Config(alloc::format!(
                "filter radius must be positive, got {radius}"
            )));
        }
        let is_active = |e: usize| active.is_some_and(|a| a[e]);
        let reach = floor(radius) as isize;
        let mut row_start = Vec::with_capacity(mesh.n_elements() + 1);
        let mut cols = Vec::new();
        let mut weights = Vec::new();
        row_start.push(0);
        for e in 0..mesh.n_elements() {
            let first = cols.len();
            if is_active(e) {
                cols.push(e);
                weights.push(1.0);
            } else {
                let (ix, iy) = mesh.element_ij(e);
                for dx in -reach..=reach {
                    let jx = ix as isize + dx;
                    if jx < 0 || jx >= mesh.nx as isize {
                        continue;
                    }
                    for dy in -reach..=reach {
                        let jy = iy as isize + dy;
                        if jy < 0 || jy >= mesh.ny as isize {
                            continue;
                        }
                        let w = radius - sqrt((dx * dx + dy * dy) as f64);
                        let n = mesh.element_index(jx as usize, jy as usize);
                        if w > 0.0 && !is_active(n) {
                            cols.push(n);
                            weights.push(w);
                        }
                    }
                }
            }
            let sum: f64 = weights[first..].iter().sum();
            for w in &mut weights[first..] {
                *w /= sum;
            }
            row_start.push(cols.len());
        }
        Ok(Self {
            radius,
            row_start,
            cols,
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.row_start.len() - 1
    }

    /// Neighbour indices and normalized weights of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_start[i]..self.row_start[i + 1];
        (&self.cols[r.clone()], &self.weights[r])
    }
}

pub fn apply_filter(
    field: &[f64],
    filter: &FilterSpec,
    mode: FilterMode,
) -> Result<Vec<f64>, TopoptError> {
    check_len(filter.n(), field.len())?;
    let mut out = vec![0.0; field.len()];
    for i in 0..filter.n() {
        let (cols, weights) = filter.row(i);
        match mode {
            FilterMode::Densities => {
                out[i] = cols.iter().zip(weights).map(|(&j, w)| w * field[j]).sum();
            }
            FilterMode::Sensitivities => {
                for (&j, w) in cols.iter().zip(weights) {
                    out[j] += w * field[i];
                }
            }
        }
    }
    Ok(out)
}
