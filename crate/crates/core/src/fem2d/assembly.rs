use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{SkylineMatrix, SkylineProfile};

use super::element::{element_matrices, ElementMatrices};
use super::material::{Material, MassInterpolation};
use super::mesh::QuadMesh;
use super::FemError;

/// Which global operator to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    Stiffness,
    Mass,
}

/// Maps full dofs to the reduced numbering left after eliminating clamped
/// dofs. The reduced numbering preserves the original order.
#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    full_to_reduced: Vec<Option<usize>>,
    reduced_to_full: Vec<usize>,
}

impl DofMap {
    pub fn from_fixed(n_full: usize, fixed: &[bool]) -> Self {
        assert_eq!(fixed.len(), n_full);
        let mut full_to_reduced = vec![None; n_full];
        let mut reduced_to_full = Vec::new();
        for (d, &is_fixed) in fixed.iter().enumerate() {
            if !is_fixed {
                full_to_reduced[d] = Some(reduced_to_full.len());
                reduced_to_full.push(d);
            }
        }
        Self {
            full_to_reduced,
            reduced_to_full,
        }
    }

    pub fn for_mesh(mesh: &QuadMesh) -> Self {
        let mut fixed = vec![false; mesh.n_dofs()];
        for set in &mesh.clamped_node_sets {
            for &node in set {
                fixed[2 * node] = true;
                fixed[2 * node + 1] = true;
            }
        }
        Self::from_fixed(mesh.n_dofs(), &fixed)
    }

    pub fn n_free(&self) -> usize {
        self.reduced_to_full.len()
    }

    pub fn n_full(&self) -> usize {
        self.full_to_reduced.len()
    }

    #[inline]
    pub fn reduced(&self, full: usize) -> Option<usize> {
        self.full_to_reduced[full]
    }

    #[inline]
    pub fn full(&self, reduced: usize) -> usize {
        self.reduced_to_full[reduced]
    }

    /// Reduced vector to full vector with zeros on eliminated dofs.
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.n_full()];
        for (r, &f) in self.reduced_to_full.iter().enumerate() {
            full[f] = reduced[r];
        }
        full
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.reduced_to_full.iter().map(|&f| full[f]).collect()
    }
}

/// Checks a density vector against the element count and `(0, 1]`.
pub fn check_densities(x: &[f64], n_elements: usize) -> Result<(), FemError> {
    if x.len() != n_elements {
        return Err(FemError::SizeMismatch {
            expected: n_elements,
            found: x.len(),
        });
    }
    for (i, &v) in x.iter().enumerate() {
        if !(v > 0.0 && v <= 1.0) {
            return Err(FemError::InvalidDensity { index: i, value: v });
        }
    }
    Ok(())
}

/// Reusable assembly context for one mesh and material: element matrices,
/// dof map, and the skyline envelope of the reduced system.
#[derive(Clone, Debug)]
pub struct Assembler {
    pub dofs: DofMap,
    pub matrices: ElementMatrices,
    pub material: Material,
    pub mass_scheme: MassInterpolation,
    element_dofs: Vec<[Option<usize>; 8]>,
    profile: SkylineProfile,
    n_elements: usize,
}

impl Assembler {
    pub fn new(mesh: &QuadMesh, material: &Material) -> Result<Self, FemError> {
        material.validate()?;
        let dofs = DofMap::for_mesh(mesh);
        let matrices = element_matrices(material, mesh.element_size, mesh.thickness)?;
        let element_dofs: Vec<[Option<usize>; 8]> = (0..mesh.n_elements())
            .map(|e| mesh.element_dofs(e).map(|d| dofs.reduced(d)))
            .collect();
        let groups: Vec<Vec<usize>> = element_dofs
            .iter()
            .map(|ed| ed.iter().flatten().copied().collect())
            .collect();
        let profile = SkylineProfile::from_groups(dofs.n_free(), groups.iter().map(Vec::as_slice));
        Ok(Self {
            dofs,
            matrices,
            material: *material,
            mass_scheme: MassInterpolation::default(),
            element_dofs,
            profile,
            n_elements: mesh.n_elements(),
        })
    }

    pub fn with_mass_scheme(mut self, scheme: MassInterpolation) -> Self {
        self.mass_scheme = scheme;
        self
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn profile(&self) -> &SkylineProfile {
        &self.profile
    }

    #[inline]
    pub fn element_dofs(&self, e: usize) -> &[Option<usize>; 8] {
        &self.element_dofs[e]
    }

    /// Element displacement vector from a reduced global vector.
    #[inline]
    pub fn gather(&self, e: usize, reduced: &[f64]) -> [f64; 8] {
        self.element_dofs[e].map(|d| d.map_or(0.0, |r| reduced[r]))
    }

    /// `a_eᵀ · block · b_e` for element `e`, with `block` one of the solid
    /// element matrices.
    pub fn element_quadratic(&self, e: usize, block: &[f64; 64], a: &[f64], b: &[f64]) -> f64 {
        let ae = self.gather(e, a);
        let be = self.gather(e, b);
        let mut s = 0.0;
        for i in 0..8 {
            if ae[i] == 0.0 {
                continue;
            }
            let row = &block[i * 8..i * 8 + 8];
            let r: f64 = row.iter().zip(&be).map(|(k, v)| k * v).sum();
            s += ae[i] * r;
        }
        s
    }

    pub fn assemble(&self, x: &[f64], kind: MatrixKind) -> Result<SkylineMatrix, FemError> {
        check_densities(x, self.n_elements)?;
        let mut global = SkylineMatrix::zeros(self.profile.clone());
        let block = match kind {
            MatrixKind::Stiffness => &self.matrices.k0,
            MatrixKind::Mass => &self.matrices.m0,
        };
        for (e, dofs) in self.element_dofs.iter().enumerate() {
            let scale = match kind {
                MatrixKind::Stiffness => self.material.stiffness_factor(x[e]),
                MatrixKind::Mass => self.mass_scheme.factor(x[e], &self.material),
            };
            global.add_block(dofs, block, scale);
        }
        Ok(global)
    }

    pub fn stiffness(&self, x: &[f64]) -> Result<SkylineMatrix, FemError> {
        self.assemble(x, MatrixKind::Stiffness)
    }

    pub fn mass(&self, x: &[f64]) -> Result<SkylineMatrix, FemError> {
        self.assemble(x, MatrixKind::Mass)
    }

    /// Consistent nodal loads of the top-edge pressure, reduced numbering.
    pub fn pressure_load(&self, mesh: &QuadMesh) -> Vec<f64> {
        let full = pressure_load(mesh);
        self.dofs.restrict(&full)
    }
}

/// Consistent nodal loads of the pressure edges, full numbering. Each edge
/// of length `a` passes `p·a·t/2` to both end nodes, downward.
pub fn pressure_load(mesh: &QuadMesh) -> Vec<f64> {
    let mut f = vec![0.0; mesh.n_dofs()];
    for edge in &mesh.pressure_edges {
        let [a, b] = edge.nodes;
        let pa = mesh.node_coords[a];
        let pb = mesh.node_coords[b];
        let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
        let len = crate::math::sqrt(dx * dx + dy * dy);
        let half = 0.5 * edge.pressure * len * mesh.thickness;
        f[2 * a + 1] -= half;
        f[2 * b + 1] -= half;
    }
    f
}

/// One-shot global assembly with the default mass interpolation.
pub fn assemble(
    mesh: &QuadMesh,
    densities: &[f64],
    material: &Material,
    kind: MatrixKind,
) -> Result<SkylineMatrix, FemError> {
    Assembler::new(mesh, material)?.assemble(densities, kind)
}
