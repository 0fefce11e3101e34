use alloc::vec;
use alloc::vec::Vec;

use crate::fem2d::{check_densities, pow, solve_static, Assembler, Material, QuadMesh, StaticSolution};
use crate::math::{powf, sqrt};

use super::{check_len, TopoptError};

/// SIMP modulus `E_min + x^pl (E0 − E_min)`.
pub fn simp_modulus(x: f64, material: &Material) -> Result<f64, TopoptError> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(TopoptError::InvalidDensity { index: 0, value: x });
    }
    Ok(material.modulus(x))
}

/// Plane-stress von Mises stress.
pub fn von_mises(sxx: f64, syy: f64, sxy: f64) -> f64 {
    sqrt((sxx * sxx - sxx * syy + syy * syy + 3.0 * sxy * sxy).max(0.0))
}

/// `(Σ vᵖ)^(1/p)` of non-negative values, scaled by the maximum so large
/// stresses and orders do not overflow.
pub fn p_norm(values: &[f64], p: f64) -> f64 {
    let m = values.iter().fold(0.0f64, |a, &v| a.max(v));
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = values.iter().map(|&v| pow(v / m, p)).sum();
    m * powf(s, 1.0 / p)
}

/// Relaxed element stresses and their p-norm.
#[derive(Clone, Debug, PartialEq)]
pub struct StressAggregate {
    pub p: f64,
    pub q: f64,
    pub sigma_vm: Vec<f64>,
    pub sigma_hat: Vec<f64>,
    pub sigma_pn: f64,
}

impl StressAggregate {
    pub fn max_relaxed(&self) -> f64 {
        self.sigma_hat.iter().fold(0.0f64, |a, &v| a.max(v))
    }
}

/// Relaxes `sigma_vm` by `x^q` and aggregates with order `p`.
pub fn pnorm_stress(
    sigma_vm: &[f64],
    densities: &[f64],
    p: f64,
    q: f64,
) -> Result<StressAggregate, TopoptError> {
    check_len(sigma_vm.len(), densities.len())?;
    if !(p >= 1.0 && q >= 0.0) {
        return Err(TopoptError::Config(alloc::format!("invalid p-norm parameters p = {p}, q = {q}")));
    }
    let sigma_hat: Vec<f64> = sigma_vm
        .iter()
        .zip(densities)
        .map(|(&s, &x)| pow(x, q) * s)
        .collect();
    Ok(StressAggregate {
        p,
        q,
        sigma_vm: sigma_vm.to_vec(),
        sigma_pn: p_norm(&sigma_hat, p),
        sigma_hat,
    })
}

/// A static solve tagged with the densities it was computed for.
#[derive(Clone, Debug)]
pub struct StaticState {
    densities: Vec<f64>,
    pub solution: StaticSolution,
}

impl StaticState {
    pub fn densities(&self) -> &[f64] {
        &self.densities
    }
}

pub fn solve_state(mesh: &QuadMesh, asm: &Assembler, densities: &[f64]) -> Result<StaticState, TopoptError> {
    check_densities(densities, asm.n_elements())?;
    let k = asm.stiffness(densities)?;
    let solution = solve_static(&k, &asm.pressure_load(mesh))?;
    Ok(StaticState {
        densities: densities.to_vec(),
        solution,
    })
}

fn element_stresses(asm: &Assembler, state: &StaticState) -> Vec<[f64; 3]> {
    (0..asm.n_elements())
        .map(|e| asm.matrices.centroid_stress(&asm.gather(e, &state.solution.u)))
        .collect()
}

/// Centroid von Mises stress of every element under the solid law.
pub fn element_von_mises(asm: &Assembler, state: &StaticState) -> Vec<f64> {
    element_stresses(asm, state)
        .iter()
        .map(|s| von_mises(s[0], s[1], s[2]))
        .collect()
}

/// `dσ_PN/dx̃` with respect to the physical densities, one adjoint solve.
///
/// `aggregate` must come from `state` and `densities`; a state solved for
/// other densities is rejected.
pub fn stress_sensitivity(
    asm: &Assembler,
    state: &StaticState,
    densities: &[f64],
    aggregate: &StressAggregate,
) -> Result<Vec<f64>, TopoptError> {
    let n = asm.n_elements();
    check_len(n, densities.len())?;
    check_len(n, aggregate.sigma_hat.len())?;
    if state.densities != densities {
        return Err(TopoptError::StaleState);
    }
    let (p, q) = (aggregate.p, aggregate.q);
    let pn = aggregate.sigma_pn;
    if pn == 0.0 {
        return Ok(vec![0.0; n]);
    }
    // D0·B at the centroid, reused for every element.
    let em = &asm.matrices;
    let mut db = [[0.0; 8]; 3];
    for r in 0..3 {
        for c in 0..8 {
            db[r][c] = (0..3).map(|k| em.d0[r][k] * em.b_centroid[k][c]).sum();
        }
    }
    let stresses = element_stresses(asm, state);
    // ∂σ_PN/∂σ̂_i = (σ̂_i / σ_PN)^(p−1)
    let dpn: Vec<f64> = aggregate.sigma_hat.iter().map(|&s| pow(s / pn, p - 1.0)).collect();

    let mut rhs = vec![0.0; asm.dofs.n_free()];
    for e in 0..n {
        let vm = aggregate.sigma_vm[e];
        if vm == 0.0 || dpn[e] == 0.0 {
            continue;
        }
        let [sx, sy, txy] = stresses[e];
        let coef = dpn[e] * pow(densities[e], q) / (2.0 * vm);
        let dvm = [2.0 * sx - sy, 2.0 * sy - sx, 6.0 * txy];
        for (c, d) in asm.element_dofs(e).iter().enumerate() {
            if let Some(r) = d {
                rhs[*r] += coef * (0..3).map(|k| dvm[k] * db[k][c]).sum::<f64>();
            }
        }
    }
    let adjoint = state.solution.solve_adjoint(&rhs);

    let mat = &asm.material;
    Ok((0..n)
        .map(|e| {
            let x = densities[e];
            let explicit = if q == 0.0 {
                0.0
            } else {
                dpn[e] * q * pow(x, q - 1.0) * aggregate.sigma_vm[e]
            };
            let implicit = mat.stiffness_factor_derivative(x)
                * asm.element_quadratic(e, &em.k0, &adjoint, &state.solution.u);
            explicit - implicit
        })
        .collect())
}
