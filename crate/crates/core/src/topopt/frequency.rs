use alloc::vec;
use alloc::vec::Vec;

use crate::fem2d::{check_densities, Assembler, EigenSolution};
use crate::math::abs;

use super::TopoptError;

/// Relative gap below which two tracked eigenvalues count as repeated.
pub const REPEATED_EIGENVALUE_TOL: f64 = 1e-3;

/// Weighted sum `λ̄ = w·λ` of the lowest eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyObjective {
    pub n_modes: usize,
    pub weights: Vec<f64>,
    /// Value from the last evaluation (rad²/s²).
    pub lambda_bar: f64,
}

impl FrequencyObjective {
    pub fn new(weights: Vec<f64>) -> Result<Self, TopoptError> {
        let sum: f64 = weights.iter().sum();
        if weights.is_empty() || weights.iter().any(|w| !(*w >= 0.0)) || abs(sum - 1.0) > 1e-12 {
            return Err(TopoptError::Config(alloc::format!(
                "frequency weights must be non-negative and sum to 1, got {weights:?}"
            )));
        }
        Ok(Self {
            n_modes: weights.len(),
            weights,
            lambda_bar: 0.0,
        })
    }
}

impl Default for FrequencyObjective {
    fn default() -> Self {
        Self::new(vec![0.7, 0.2, 0.1]).unwrap()
    }
}

pub fn frequency_objective(
    eig: &EigenSolution,
    objective: &mut FrequencyObjective,
) -> Result<f64, TopoptError> {
    if eig.eigenvalues.len() < objective.n_modes {
        return Err(TopoptError::InsufficientModes {
            needed: objective.n_modes,
            found: eig.eigenvalues.len(),
        });
    }
    objective.lambda_bar = objective
        .weights
        .iter()
        .zip(&eig.eigenvalues)
        .map(|(w, l)| w * l)
        .sum();
    Ok(objective.lambda_bar)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGradient {
    /// `dλ̄/dx̃` per element.
    pub gradient: Vec<f64>,
    /// Two tracked eigenvalues closer than [`REPEATED_EIGENVALUE_TOL`]; the
    /// single-mode derivatives are then not well defined.
    pub repeated: bool,
}

/// `dλ_j/dx_i = φ_jᵀ (K_i' − λ_j M_i') φ_j` combined with the weights.
/// Eigenvectors must be mass-normalized.
pub fn frequency_sensitivity(
    eig: &EigenSolution,
    asm: &Assembler,
    densities: &[f64],
    objective: &FrequencyObjective,
) -> Result<FrequencyGradient, TopoptError> {
    check_densities(densities, asm.n_elements())?;
    let n_modes = objective.n_modes;
    if eig.eigenvalues.len() < n_modes {
        return Err(TopoptError::InsufficientModes {
            needed: n_modes,
            found: eig.eigenvalues.len(),
        });
    }
    let lambdas = &eig.eigenvalues[..n_modes];
    let repeated = lambdas
        .windows(2)
        .any(|w| abs(w[1] - w[0]) <= REPEATED_EIGENVALUE_TOL * abs(w[1]));

    let (mat, scheme, em) = (&asm.material, &asm.mass_scheme, &asm.matrices);
    let mut gradient = vec![0.0; asm.n_elements()];
    for (j, &w) in objective.weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let phi = &eig.eigenvectors[j];
        for (e, g) in gradient.iter_mut().enumerate() {
            let x = densities[e];
            let strain = asm.element_quadratic(e, &em.k0, phi, phi);
            let kinetic = asm.element_quadratic(e, &em.m0, phi, phi);
            *g += w
                * (mat.stiffness_factor_derivative(x) * strain
                    - lambdas[j] * scheme.derivative(x, mat) * kinetic);
        }
    }
    Ok(FrequencyGradient { gradient, repeated })
}

/// Share of the strain energy `φᵀKφ` of mode `mode` stored in elements
/// whose density does not exceed `threshold`.
pub fn modal_strain_energy_fraction(
    eig: &EigenSolution,
    asm: &Assembler,
    densities: &[f64],
    mode: usize,
    threshold: f64,
) -> Result<f64, TopoptError> {
    check_densities(densities, asm.n_elements())?;
    let phi = eig.eigenvectors.get(mode).ok_or(TopoptError::InsufficientModes {
        needed: mode + 1,
        found: eig.eigenvectors.len(),
    })?;
    let (mut low, mut total) = (0.0, 0.0);
    for (e, &x) in densities.iter().enumerate() {
        let energy =
            asm.material.stiffness_factor(x) * asm.element_quadratic(e, &asm.matrices.k0, phi, phi);
        total += energy;
        if x <= threshold {
            low += energy;
        }
    }
    Ok(if total > 0.0 { low / total } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eig(values: &[f64]) -> EigenSolution {
        EigenSolution {
            eigenvalues: values.to_vec(),
            eigenvectors: vec![vec![]; values.len()],
            frequencies: vec![0.0; values.len()],
            residuals: vec![0.0; values.len()],
        }
    }

    #[test]
    fn weighted_sum_examples() {
        let mut first = FrequencyObjective::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(frequency_objective(&eig(&[4.0, 9.0, 25.0]), &mut first).unwrap(), 4.0);
        let mut mixed = FrequencyObjective::new(vec![0.5, 0.3, 0.2]).unwrap();
        let v = frequency_objective(&eig(&[4.0, 9.0, 25.0]), &mut mixed).unwrap();
        assert!((v - 9.7).abs() < 1e-12);
        assert_eq!(mixed.lambda_bar, v);
        let mut default = FrequencyObjective::default();
        let v = frequency_objective(&eig(&[3.0, 3.0, 3.0]), &mut default).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_modes_is_an_error() {
        let mut obj = FrequencyObjective::default();
        assert!(matches!(
            frequency_objective(&eig(&[1.0, 2.0]), &mut obj),
            Err(TopoptError::InsufficientModes { needed: 3, found: 2 })
        ));
    }

    #[test]
    fn weights_are_validated() {
        assert!(FrequencyObjective::new(vec![0.5, 0.4]).is_err());
        assert!(FrequencyObjective::new(vec![1.2, -0.2]).is_err());
        assert!(FrequencyObjective::new(vec![]).is_err());
    }
}
