//! SIMP topology optimization of the beam domain.
//!
//! The loop filters the design variables into physical densities, solves
//! the plane-stress problem, evaluates either the p-norm of the relaxed von
//! Mises field or a weighted sum of the lowest eigenvalues, pulls the
//! sensitivities back through the filter and hands everything to MMA.
//!
//! Face plates are active elements frozen at full density. They take part
//! in the volume budget but are not design variables.

mod density;
mod filter;
mod frequency;
mod run;
mod stress;
mod volume;

pub use density::{DensityField, X_MIN};
pub use filter::{apply_filter, FilterMode, FilterSpec};
pub use frequency::{
    frequency_objective, frequency_sensitivity, modal_strain_energy_fraction, FrequencyGradient,
    FrequencyObjective, REPEATED_EIGENVALUE_TOL,
};
pub use run::{
    run_topopt, IterationRecord, JointSpec, Objective, Termination, TopoptConfig, TopoptRun,
    TopoptStudy,
};
pub use stress::{
    element_von_mises, p_norm, pnorm_stress, simp_modulus, solve_state, stress_sensitivity,
    von_mises, StaticState, StressAggregate,
};
pub use volume::VolumeConstraint;

use alloc::string::String;

use crate::fem2d::FemError;
use crate::mma::MmaError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TopoptError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("density {value} of element {index} is outside (0, 1]")]
    InvalidDensity { index: usize, value: f64 },
    #[error("expected {expected} entries, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("displacements were computed for a different density field")]
    StaleState,
    #[error("{needed} modes needed, {found} available")]
    InsufficientModes { needed: usize, found: usize },
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Mma(#[from] MmaError),
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<(), TopoptError> {
    if expected == found {
        Ok(())
    } else {
        Err(TopoptError::SizeMismatch { expected, found })
    }
}
