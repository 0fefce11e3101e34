use alloc::vec;
use alloc::vec::Vec;

use crate::fem2d::Material;
use crate::linalg::{
    generalized_eigen, reverse_cuthill_mckee, EigenOptions, LinalgError,
    SkylineMatrix, SkylineProfile,
};
use crate::math::{abs, sqrt};

use super::frame::{FrameModel, Member};
use super::SandwichError;

/// Beam element of unit depth in local coordinates `(u, v, θ)` per node.
fn local_stiffness(e: f64, t: f64, l: f64) -> [f64; 36] {
    let ea = e * t / l;
    let ei = e * t * t * t / 12.0;
    let (k1, k2, k3, k4) = (12.0 * ei / (l * l * l), 6.0 * ei / (l * l), 4.0 * ei / l, 2.0 * ei / l);
    [
        ea, 0.0, 0.0, -ea, 0.0, 0.0, //
        0.0, k1, k2, 0.0, -k1, k2, //
        0.0, k2, k3, 0.0, -k2, k4, //
        -ea, 0.0, 0.0, ea, 0.0, 0.0, //
        0.0, -k1, -k2, 0.0, k1, -k2, //
        0.0, k2, k4, 0.0, -k2, k3,
    ]
}

/// Consistent mass with linear axial and Hermite transverse shapes.
fn local_mass(rho: f64, t: f64, l: f64) -> [f64; 36] {
    let m = rho * t * l / 420.0;
    let ll = l * l;
    [
        140.0 * m, 0.0, 0.0, 70.0 * m, 0.0, 0.0, //
        0.0, 156.0 * m, 22.0 * l * m, 0.0, 54.0 * m, -13.0 * l * m, //
        0.0, 22.0 * l * m, 4.0 * ll * m, 0.0, 13.0 * l * m, -3.0 * ll * m, //
        70.0 * m, 0.0, 0.0, 140.0 * m, 0.0, 0.0, //
        0.0, 54.0 * m, 13.0 * l * m, 0.0, 156.0 * m, -22.0 * l * m, //
        0.0, -13.0 * l * m, -3.0 * ll * m, 0.0, -22.0 * l * m, 4.0 * ll * m,
    ]
}

/// `Tᵀ A T` for the 6×6 rotation `T` with direction cosines `(c, s)`.
/// `T` is block diagonal, so each 3×3 block is rotated on its own.
fn rotate(a: &[f64; 36], c: f64, s: f64) -> [f64; 36] {
    let r = [[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]];
    let mut at = [0.0; 36];
    for i in 0..6 {
        for b in [0, 3] {
            for j in 0..3 {
                at[i * 6 + b + j] = a[i * 6 + b] * r[0][j] + a[i * 6 + b + 1] * r[1][j] + a[i * 6 + b + 2] * r[2][j];
            }
        }
    }
    let mut out = [0.0; 36];
    for b in [0, 3] {
        for i in 0..3 {
            for j in 0..6 {
                out[(b + i) * 6 + j] =
                    r[0][i] * at[b * 6 + j] + r[1][i] * at[(b + 1) * 6 + j] + r[2][i] * at[(b + 2) * 6 + j];
            }
        }
    }
    out
}

struct Geometry {
    l: f64,
    c: f64,
    s: f64,
}

fn geometry(model: &FrameModel, m: &Member) -> Geometry {
    let [a, b] = m.nodes;
    let (pa, pb) = (model.nodes[a], model.nodes[b]);
    let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
    let l = sqrt(dx * dx + dy * dy);
    Geometry {
        l,
        c: dx / l,
        s: dy / l,
    }
}

/// Local distributed load `(q_x, q_y)` of a member under downward pressure.
fn local_load(m: &Member, g: &Geometry) -> (f64, f64) {
    let p = -m.pressure;
    (g.s * p, g.c * p)
}

fn equivalent_load(qx: f64, qy: f64, l: f64) -> [f64; 6] {
    [
        qx * l / 2.0,
        qy * l / 2.0,
        qy * l * l / 12.0,
        qx * l / 2.0,
        qy * l / 2.0,
        -qy * l * l / 12.0,
    ]
}

/// Assembled frame operators in reduced, bandwidth-ordered numbering.
pub struct FrameSystem {
    pub stiffness: SkylineMatrix,
    pub mass: SkylineMatrix,
    pub load: Vec<f64>,
    dofs: Vec<[Option<usize>; 3]>,
}

impl FrameSystem {
    pub fn assemble(model: &FrameModel, material: &Material) -> Result<Self, SandwichError> {
        let n = model.nodes.len();
        let mut adjacency = vec![Vec::new(); n];
        for m in &model.members {
            let [a, b] = m.nodes;
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let order = reverse_cuthill_mckee(&adjacency);
        let mut clamped = vec![false; n];
        for &c in &model.clamped {
            clamped[c] = true;
        }
        if model.clamped.is_empty() {
            return Err(SandwichError::Singular);
        }
        let mut dofs = vec![[None; 3]; n];
        let mut next = 0;
        for &node in &order {
            if !clamped[node] {
                dofs[node] = [Some(next), Some(next + 1), Some(next + 2)];
                next += 3;
            }
        }
        let groups: Vec<Vec<usize>> = model
            .members
            .iter()
            .map(|m| m.nodes.iter().flat_map(|&v| dofs[v].iter().flatten().copied()).collect())
            .collect();
        let profile = SkylineProfile::from_groups(next, groups.iter().map(Vec::as_slice));
        let mut stiffness = SkylineMatrix::zeros(profile.clone());
        let mut mass = SkylineMatrix::zeros(profile);
        let mut load = vec![0.0; next];
        for m in &model.members {
            let g = geometry(model, m);
            let ed = element_dofs(&dofs, m);
            stiffness.add_block(&ed, &rotate(&local_stiffness(material.e0, m.thickness, g.l), g.c, g.s), 1.0);
            mass.add_block(&ed, &rotate(&local_mass(material.rho, m.thickness, g.l), g.c, g.s), 1.0);
            if m.pressure != 0.0 {
                let (qx, qy) = local_load(m, &g);
                let fl = equivalent_load(qx, qy, g.l);
                let fg = to_global(&fl, g.c, g.s);
                for (d, f) in ed.iter().zip(fg) {
                    if let Some(r) = d {
                        load[*r] += f;
                    }
                }
            }
        }
        Ok(Self {
            stiffness,
            mass,
            load,
            dofs,
        })
    }

    pub fn n_free(&self) -> usize {
        self.load.len()
    }

    /// Largest `|N|/t + 6|M|/t²` over member ends and midpoints, for the
    /// reduced displacement vector `u`.
    pub fn max_stress(&self, model: &FrameModel, material: &Material, u: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for m in &model.members {
            let g = geometry(model, m);
            let ed = element_dofs(&self.dofs, m);
            let ug: [f64; 6] = core::array::from_fn(|i| ed[i].map_or(0.0, |r| u[r]));
            let ul = to_local(&ug, g.c, g.s);
            let k = local_stiffness(material.e0, m.thickness, g.l);
            let (qx, qy) = local_load(m, &g);
            let feq = equivalent_load(qx, qy, g.l);
            let f: [f64; 6] =
                core::array::from_fn(|i| (0..6).map(|j| k[i * 6 + j] * ul[j]).sum::<f64>() - feq[i]);
            let t = m.thickness;
            let moment = |x: f64| -f[2] + f[1] * x + qy * x * x / 2.0;
            let axial = |x: f64| -f[0] - qx * x;
            for x in [0.0, g.l / 2.0, g.l] {
                let sigma = abs(axial(x)) / t + 6.0 * abs(moment(x)) / (t * t);
                worst = worst.max(sigma);
            }
        }
        worst
    }
}

fn element_dofs(dofs: &[[Option<usize>; 3]], m: &Member) -> [Option<usize>; 6] {
    let [a, b] = m.nodes;
    [dofs[a][0], dofs[a][1], dofs[a][2], dofs[b][0], dofs[b][1], dofs[b][2]]
}

fn to_global(f: &[f64; 6], c: f64, s: f64) -> [f64; 6] {
    [
        c * f[0] - s * f[1],
        s * f[0] + c * f[1],
        f[2],
        c * f[3] - s * f[4],
        s * f[3] + c * f[4],
        f[5],
    ]
}

fn to_local(u: &[f64; 6], c: f64, s: f64) -> [f64; 6] {
    [
        c * u[0] + s * u[1],
        -s * u[0] + c * u[1],
        u[2],
        c * u[3] + s * u[4],
        -s * u[3] + c * u[4],
        u[5],
    ]
}

/// Relative residual accepted for the frame eigenpair. The eigenvalue
/// error is of the order of the squared residual.
pub const FRAME_EIGEN_TOLERANCE: f64 = 1e-4;

// One well-separated mode under shift-invert needs only a short Krylov run;
// the solver doubles it if not.
const FRAME_SUBSPACE: usize = 10;

/// Lowest natural frequency (Hz) of the frame.
pub fn fundamental_frequency(system: &FrameSystem) -> Result<f64, SandwichError> {
    // Thin plates make the axial/bending stiffness ratio large, which lifts
    // the rounding floor of the residual above the continuum default.
    let options = EigenOptions {
        tolerance: FRAME_EIGEN_TOLERANCE,
        subspace: Some(FRAME_SUBSPACE),
        ..EigenOptions::default()
    };
    let pairs = generalized_eigen(&system.stiffness, &system.mass, 1, &options)
        .map_err(|e| match e {
            LinalgError::NotPositiveDefinite { .. } => SandwichError::Singular,
            other => SandwichError::Eigen(other),
        })?;
    Ok(sqrt(pairs.values[0].max(0.0)) / (2.0 * core::f64::consts::PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_matrices_are_symmetric_and_rigid_body_free() {
        let k = rotate(&local_stiffness(210e9, 0.003, 0.01), 0.6, 0.8);
        let m = rotate(&local_mass(7850.0, 0.003, 0.01), 0.6, 0.8);
        for i in 0..6 {
            for j in 0..6 {
                assert!((k[i * 6 + j] - k[j * 6 + i]).abs() < 1e-6 * k[0].abs());
                assert!((m[i * 6 + j] - m[j * 6 + i]).abs() < 1e-12);
            }
        }
        // Translation along the member and a rigid rotation about node a.
        let (c, s, l) = (0.6, 0.8, 0.01);
        let trans = [1.0, 2.0, 0.0, 1.0, 2.0, 0.0];
        let rot = [0.0, 0.0, 1.0, -s * l, c * l, 1.0];
        for u in [trans, rot] {
            for i in 0..6 {
                let r: f64 = (0..6).map(|j| k[i * 6 + j] * u[j]).sum();
                assert!(r.abs() < 1e-6 * k[0].abs() * 1e-3, "{r}");
            }
        }
        // Total translational mass.
        let ux = [1.0, 0.0, 0.0, 1.0, 0.0, 0.0];
        let total: f64 = (0..6)
            .map(|i| (0..6).map(|j| ux[i] * m[i * 6 + j] * ux[j]).sum::<f64>())
            .sum();
        assert!((total - 7850.0 * 0.003 * 0.01).abs() < 1e-12);
    }
}
