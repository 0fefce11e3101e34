use alloc::vec;
use alloc::vec::Vec;

use crate::fem2d::QuadMesh;

use super::{check_len, TopoptError};

/// Lower bound on design variables.
pub const X_MIN: f64 = 1e-3;

/// Per-element relative densities with the mask of active (frozen solid)
/// elements.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityField {
    pub x: Vec<f64>,
    pub active: Vec<bool>,
    pub element_volumes: Vec<f64>,
}

impl DensityField {
    pub fn new(x: Vec<f64>, active: Vec<bool>, element_volumes: Vec<f64>) -> Result<Self, TopoptError> {
        check_len(x.len(), active.len())?;
        check_len(x.len(), element_volumes.len())?;
        for (i, &v) in x.iter().enumerate() {
            if !(v > 0.0 && v <= 1.0) || (active[i] && v != 1.0) {
                return Err(TopoptError::InvalidDensity { index: i, value: v });
            }
        }
        Ok(Self {
            x,
            active,
            element_volumes,
        })
    }

    /// Design elements at `value`, active elements at 1.
    pub fn uniform(mesh: &QuadMesh, value: f64, active: Vec<bool>) -> Result<Self, TopoptError> {
        check_len(mesh.n_elements(), active.len())?;
        let x = active.iter().map(|&a| if a { 1.0 } else { value }).collect();
        Self::new(x, active, vec![mesh.element_volume(); mesh.n_elements()])
    }

    /// Mask of `layers` element rows at the top and bottom of the mesh.
    /// With `span = Some((x0, x1))` only elements whose centroid lies in
    /// `[x0, x1]` are marked.
    pub fn face_mask(mesh: &QuadMesh, layers: usize, span: Option<(f64, f64)>) -> Vec<bool> {
        (0..mesh.n_elements())
            .map(|e| {
                let (_, iy) = mesh.element_ij(e);
                let in_row = iy < layers || iy + layers >= mesh.ny;
                let in_span = span.map_or(true, |(a, b)| {
                    let cx = mesh.element_centroid(e)[0];
                    cx >= a && cx <= b
                });
                in_row && in_span
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn total_volume(&self) -> f64 {
        self.element_volumes.iter().sum()
    }

    pub fn material_volume(&self) -> f64 {
        self.x.iter().zip(&self.element_volumes).map(|(x, v)| x * v).sum()
    }

    pub fn volume_fraction(&self) -> f64 {
        self.material_volume() / self.total_volume()
    }

    /// Indices of the free design elements.
    pub fn design_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.active[i]).collect()
    }
}
