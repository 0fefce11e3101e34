//! Bilinear plane-stress quadrilateral on a square of side `a`.

use crate::math::sqrt;

use super::material::Material;
use super::FemError;

/// Natural coordinates of the corner nodes, counter-clockwise.
const CORNERS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];

/// Solid-element matrices shared by every element of a structured mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementMatrices {
    /// 8×8 stiffness of the solid element (modulus `E0`), row-major.
    pub k0: [f64; 64],
    /// 8×8 consistent mass of the solid element, row-major.
    pub m0: [f64; 64],
    /// Strain-displacement matrix at the centroid (3×8).
    pub b_centroid: [[f64; 8]; 3],
    /// Plane-stress constitutive matrix at `E0`.
    pub d0: [[f64; 3]; 3],
}

/// Plane-stress elasticity matrix for modulus `e`.
pub fn plane_stress_d(e: f64, nu: f64) -> [[f64; 3]; 3] {
    let f = e / (1.0 - nu * nu);
    [
        [f, nu * f, 0.0],
        [nu * f, f, 0.0],
        [0.0, 0.0, f * (1.0 - nu) / 2.0],
    ]
}

fn shape(xi: f64, eta: f64) -> [f64; 4] {
    let mut n = [0.0; 4];
    for (k, (a, b)) in CORNERS.iter().enumerate() {
        n[k] = 0.25 * (1.0 + a * xi) * (1.0 + b * eta);
    }
    n
}

/// Strain-displacement matrix at `(ξ, η)` for a square of side `a`.
fn b_matrix(xi: f64, eta: f64, a: f64) -> [[f64; 8]; 3] {
    let mut b = [[0.0; 8]; 3];
    let scale = 2.0 / a;
    for (k, (ck, dk)) in CORNERS.iter().enumerate() {
        let dx = 0.25 * ck * (1.0 + dk * eta) * scale;
        let dy = 0.25 * dk * (1.0 + ck * xi) * scale;
        b[0][2 * k] = dx;
        b[1][2 * k + 1] = dy;
        b[2][2 * k] = dy;
        b[2][2 * k + 1] = dx;
    }
    b
}

/// Stiffness by 2×2 Gauss quadrature and consistent mass for a square
/// element of side `element_size` and out-of-plane `thickness`.
pub fn element_matrices(
    material: &Material,
    element_size: f64,
    thickness: f64,
) -> Result<ElementMatrices, FemError> {
    if !(element_size > 0.0 && thickness > 0.0) {
        return Err(FemError::NonPositive("element size and thickness"));
    }
    let a = element_size;
    let d = plane_stress_d(material.e0, material.nu);
    let g = 1.0 / sqrt(3.0);
    let det_j = a * a / 4.0;
    let mut k0 = [0.0; 64];
    let mut m0 = [0.0; 64];
    for &xi in &[-g, g] {
        for &eta in &[-g, g] {
            let b = b_matrix(xi, eta, a);
            let mut db = [[0.0; 8]; 3];
            for r in 0..3 {
                for c in 0..8 {
                    db[r][c] = (0..3).map(|s| d[r][s] * b[s][c]).sum();
                }
            }
            for i in 0..8 {
                for j in 0..8 {
                    let v: f64 = (0..3).map(|r| b[r][i] * db[r][j]).sum();
                    k0[i * 8 + j] += v * det_j * thickness;
                }
            }
            let n = shape(xi, eta);
            for p in 0..4 {
                for q in 0..4 {
                    let v = material.rho * thickness * n[p] * n[q] * det_j;
                    m0[(2 * p) * 8 + 2 * q] += v;
                    m0[(2 * p + 1) * 8 + 2 * q + 1] += v;
                }
            }
        }
    }
    Ok(ElementMatrices {
        k0,
        m0,
        b_centroid: b_matrix(0.0, 0.0, a),
        d0: d,
    })
}

impl ElementMatrices {
    /// Centroid stress `D0 · B · u_e` of the solid law.
    pub fn centroid_stress(&self, ue: &[f64; 8]) -> [f64; 3] {
        let mut strain = [0.0; 3];
        for (r, row) in self.b_centroid.iter().enumerate() {
            strain[r] = row.iter().zip(ue).map(|(b, u)| b * u).sum();
        }
        let mut s = [0.0; 3];
        for r in 0..3 {
            s[r] = (0..3).map(|c| self.d0[r][c] * strain[c]).sum();
        }
        s
    }
}
