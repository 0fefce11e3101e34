use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::fem2d::{
    build_mesh, solve_eigen_with, Assembler, BoundarySpec, ClampSpec, Edge, EigenSolution,
    FemError, MassInterpolation, Material, QuadMesh,
};
use crate::linalg::{EigenOptions, LinalgError};
use crate::math::abs;
use crate::mma::{mma_update, Bounds, MmaSettings, MmaState};

use super::density::{DensityField, X_MIN};
use super::filter::{apply_filter, FilterMode, FilterSpec};
use super::frequency::{frequency_objective, frequency_sensitivity, FrequencyObjective};
use super::stress::{element_von_mises, pnorm_stress, solve_state, stress_sensitivity};
use super::volume::VolumeConstraint;
use super::TopoptError;

#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    /// Minimize the p-norm of `x^q σ_vm`.
    Stress { p: f64, q: f64 },
    /// Maximize `w·λ` over the lowest `weights.len()` modes.
    Frequency { weights: Vec<f64> },
}

impl Objective {
    pub fn stress() -> Self {
        Self::Stress { p: 8.0, q: 1.5 }
    }

    pub fn frequency() -> Self {
        Self::Frequency {
            weights: vec![0.7, 0.2, 0.1],
        }
    }

    fn default_max_iterations(&self) -> usize {
        match self {
            Self::Stress { .. } => 2000,
            Self::Frequency { .. } => 300,
        }
    }
}

/// Joint sections added at both ends of the beam. The outer edges are
/// clamped over `clamp_band` (fractions of the height); pressure and face
/// plates cover the beam only.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointSpec {
    pub span: f64,
    pub clamp_band: (f64, f64),
}

impl Default for JointSpec {
    fn default() -> Self {
        Self {
            span: 0.12,
            clamp_band: (0.0, 1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopoptConfig {
    /// Beam span (m), joints excluded.
    pub length: f64,
    pub height: f64,
    pub element_size: f64,
    /// Top pressure (Pa).
    pub pressure: f64,
    pub joints: Option<JointSpec>,
    pub material: Material,
    pub mass_scheme: MassInterpolation,
    pub objective: Objective,
    pub volume_fraction: f64,
    /// In element lengths.
    pub filter_radius: f64,
    /// Element rows frozen solid at the top and at the bottom.
    pub face_layers: usize,
    pub x_min: f64,
    pub move_limit: f64,
    /// Stop once `max |Δx|` falls below this.
    pub tolerance: f64,
    /// `None` uses 2000 for stress and 300 for frequency.
    pub max_iterations: Option<usize>,
    pub eigen: EigenOptions,
}

impl TopoptConfig {
    /// The clamped 1.0 × 0.045 m beam at 1 mm elements.
    pub fn beam(objective: Objective, volume_fraction: f64) -> Self {
        Self {
            length: 1.0,
            height: 0.045,
            element_size: 0.001,
            pressure: 50e3,
            joints: None,
            material: Material::steel(),
            mass_scheme: MassInterpolation::default(),
            objective,
            volume_fraction,
            filter_radius: 3.0,
            face_layers: 1,
            x_min: X_MIN,
            move_limit: 0.2,
            tolerance: 0.01,
            max_iterations: None,
            eigen: EigenOptions::default(),
        }
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
            .unwrap_or_else(|| self.objective.default_max_iterations())
    }

    pub fn domain_length(&self) -> f64 {
        self.length + self.joints.map_or(0.0, |j| 2.0 * j.span)
    }

    fn boundary(&self) -> BoundarySpec {
        match self.joints {
            None => BoundarySpec::clamped_both_ends(self.pressure),
            Some(j) => BoundarySpec {
                clamps: vec![
                    ClampSpec {
                        edge: Edge::Left,
                        y_range: j.clamp_band,
                    },
                    ClampSpec {
                        edge: Edge::Right,
                        y_range: j.clamp_band,
                    },
                ],
                pressure: self.pressure,
                pressure_span: Some((j.span, j.span + self.length)),
            },
        }
    }

    fn validate(&self) -> Result<(), TopoptError> {
        let bad = |m: &str| Err(TopoptError::Config(m.into()));
        if !(self.volume_fraction > 0.0 && self.volume_fraction <= 1.0) {
            return bad("volume fraction must lie in (0, 1]");
        }
        if !(self.x_min > 0.0 && self.x_min < 1.0) {
            return bad("x_min must lie in (0, 1)");
        }
        if !(self.move_limit > 0.0 && self.move_limit <= 1.0) {
            return bad("move limit must lie in (0, 1]");
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        if !(self.pressure >= 0.0 && self.pressure.is_finite()) {
            return bad("pressure must be finite and non-negative");
        }
        if let Some(j) = self.joints {
            let (a, b) = j.clamp_band;
            if !(j.span > 0.0 && a >= 0.0 && b <= 1.0 && a < b) {
                return bad("joint span must be positive and the clamp band inside [0, 1]");
            }
        }
        match &self.objective {
            Objective::Stress { p, q } if !(*p >= 2.0 && *q >= 0.0) => bad("stress objective needs p >= 2, q >= 0"),
            Objective::Frequency { weights } => FrequencyObjective::new(weights.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }
}

/// Prepared mesh, operators and bookkeeping for one configuration.
#[derive(Clone, Debug)]
pub struct TopoptStudy {
    pub config: TopoptConfig,
    pub mesh: QuadMesh,
    pub assembler: Assembler,
    pub filter: FilterSpec,
    pub active: Vec<bool>,
    pub element_volumes: Vec<f64>,
    pub constraint: VolumeConstraint,
    design: Vec<usize>,
}

/// Objective value and gradient with respect to the physical densities.
#[derive(Clone, Debug)]
pub struct Response {
    /// σ_PN (Pa) or λ̄ (rad²/s²).
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Tracked frequencies (Hz), empty for the stress objective.
    pub frequencies: Vec<f64>,
    pub repeated: bool,
}

impl TopoptStudy {
    pub fn new(config: &TopoptConfig) -> Result<Self, TopoptError> {
        config.validate()?;
        let mesh = build_mesh(
            config.domain_length(),
            config.height,
            config.element_size,
            &config.boundary(),
        )?;
        if 2 * config.face_layers >= mesh.ny {
            return Err(TopoptError::Config(format!(
                "{} face layers leave no core in {} element rows",
                config.face_layers, mesh.ny
            )));
        }
        let assembler = Assembler::new(&mesh, &config.material)?.with_mass_scheme(config.mass_scheme);
        let span = config.joints.map(|j| (j.span, j.span + config.length));
        let active = DensityField::face_mask(&mesh, config.face_layers, span);
        let filter = FilterSpec::with_mask(&mesh, config.filter_radius, &active)?;
        let element_volumes = vec![mesh.element_volume(); mesh.n_elements()];
        let constraint = VolumeConstraint::new(config.volume_fraction, &element_volumes)?;
        let design = (0..mesh.n_elements()).filter(|&e| !active[e]).collect();
        Ok(Self {
            config: config.clone(),
            mesh,
            assembler,
            filter,
            active,
            element_volumes,
            constraint,
            design,
        })
    }

    pub fn design_indices(&self) -> &[usize] {
        &self.design
    }

    /// Uniform design variables that meet the volume target exactly.
    pub fn initial_design(&self) -> Result<Vec<f64>, TopoptError> {
        let active_volume: f64 = (0..self.active.len())
            .filter(|&e| self.active[e])
            .map(|e| self.element_volumes[e])
            .sum();
        let design_volume: f64 = self.design.iter().map(|&e| self.element_volumes[e]).sum();
        let c = (self.config.volume_fraction * self.constraint.total_volume - active_volume) / design_volume;
        if c <= self.config.x_min {
            return Err(TopoptError::Config(format!(
                "volume fraction {} does not cover the face plates",
                self.config.volume_fraction
            )));
        }
        self.uniform_design(c.min(1.0))
    }

    /// Design elements at `value`, faces solid.
    pub fn uniform_design(&self, value: f64) -> Result<Vec<f64>, TopoptError> {
        Ok(DensityField::uniform(&self.mesh, value, self.active.clone())?.x)
    }

    /// Filtered densities. Rounding in the weighted average can land an
    /// ulp above 1, which is clipped.
    pub fn physical(&self, x: &[f64]) -> Result<Vec<f64>, TopoptError> {
        let mut out = apply_filter(x, &self.filter, FilterMode::Densities)?;
        for v in &mut out {
            *v = v.min(1.0);
        }
        Ok(out)
    }

    pub fn volume_fraction(&self, physical: &[f64]) -> f64 {
        let used: f64 = physical.iter().zip(&self.element_volumes).map(|(x, v)| x * v).sum();
        used / self.constraint.total_volume
    }

    pub fn eigen(&self, physical: &[f64], n_modes: usize) -> Result<EigenSolution, TopoptError> {
        let k = self.assembler.stiffness(physical)?;
        let m = self.assembler.mass(physical)?;
        match solve_eigen_with(&k, &m, n_modes, &self.config.eigen) {
            Err(FemError::Eigen(LinalgError::NotConverged { .. })) => {
                let base = self.config.eigen.subspace.unwrap_or((2 * n_modes + 20).max(40));
                let retry = EigenOptions {
                    subspace: Some(2 * base),
                    ..self.config.eigen.clone()
                };
                Ok(solve_eigen_with(&k, &m, n_modes, &retry)?)
            }
            other => Ok(other?),
        }
    }

    pub fn evaluate(&self, physical: &[f64]) -> Result<Response, TopoptError> {
        match &self.config.objective {
            Objective::Stress { p, q } => {
                let state = solve_state(&self.mesh, &self.assembler, physical)?;
                let vm = element_von_mises(&self.assembler, &state);
                let agg = pnorm_stress(&vm, physical, *p, *q)?;
                let gradient = stress_sensitivity(&self.assembler, &state, physical, &agg)?;
                Ok(Response {
                    value: agg.sigma_pn,
                    gradient,
                    frequencies: Vec::new(),
                    repeated: false,
                })
            }
            Objective::Frequency { weights } => {
                let mut objective = FrequencyObjective::new(weights.clone())?;
                let eig = self.eigen(physical, objective.n_modes)?;
                let value = frequency_objective(&eig, &mut objective)?;
                let grad = frequency_sensitivity(&eig, &self.assembler, physical, &objective)?;
                Ok(Response {
                    value,
                    gradient: grad.gradient,
                    frequencies: eig.frequencies,
                    repeated: grad.repeated,
                })
            }
        }
    }

    /// Pulls a gradient with respect to physical densities back to the
    /// design variables.
    fn design_gradient(&self, mut physical_gradient: Vec<f64>) -> Result<Vec<f64>, TopoptError> {
        for (g, &a) in physical_gradient.iter_mut().zip(&self.active) {
            if a {
                *g = 0.0;
            }
        }
        let full = apply_filter(&physical_gradient, &self.filter, FilterMode::Sensitivities)?;
        Ok(self.design.iter().map(|&e| full[e]).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// σ_PN (Pa) or λ̄ (rad²/s²) of the evaluated design.
    pub objective: f64,
    /// Value handed to MMA: `σ_PN/σ_PN0` or `−λ̄/λ̄0`.
    pub scaled_objective: f64,
    pub volume_fraction: f64,
    pub constraint: f64,
    /// `max |Δx|` of the update that followed.
    pub change: f64,
    /// First natural frequency (Hz), frequency objective only.
    pub f1: Option<f64>,
    pub repeated_eigenvalues: bool,
    pub infeasible_subproblem: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    Converged,
    MaxIterations,
    Failed { iteration: usize, error: TopoptError },
}

#[derive(Clone, Debug)]
pub struct TopoptRun {
    pub history: Vec<IterationRecord>,
    /// Design variables, faces included.
    pub design: Vec<f64>,
    /// Filtered densities of the last design.
    pub field: DensityField,
    pub mesh: QuadMesh,
    pub termination: Termination,
    /// Objective of the last design; `None` if it could not be evaluated.
    pub objective: Option<f64>,
    /// Tracked frequencies of the last design (Hz), frequency objective only.
    pub frequencies: Vec<f64>,
}

impl TopoptRun {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }
}

/// Runs the optimization loop. Invalid configurations are returned as
/// errors; failures inside the loop end the run with
/// [`Termination::Failed`] and keep the history so far.
pub fn run_topopt(
    config: &TopoptConfig,
    mut observer: Option<&mut dyn FnMut(&IterationRecord, &[f64])>,
) -> Result<TopoptRun, TopoptError> {
    let study = TopoptStudy::new(config)?;
    let mut x = study.initial_design()?;
    let design = study.design_indices().to_vec();
    let n = design.len();
    let bounds = Bounds::uniform(n, config.x_min, 1.0);
    let mut mma = MmaState::with_settings(
        n,
        MmaSettings {
            move_limit: config.move_limit,
            ..MmaSettings::default()
        },
    );
    let dg = vec![study.design_gradient(study.constraint.gradient(&study.element_volumes))?];

    let mut history = Vec::new();
    let mut scale = 0.0;
    let mut termination = Termination::MaxIterations;
    let sign = match config.objective {
        Objective::Stress { .. } => 1.0,
        Objective::Frequency { .. } => -1.0,
    };

    for iteration in 0..config.max_iterations() {
        let step = (|| -> Result<(IterationRecord, Vec<f64>), TopoptError> {
            let physical = study.physical(&x)?;
            let response = study.evaluate(&physical)?;
            if iteration == 0 {
                scale = abs(response.value);
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(TopoptError::Config(format!(
                        "initial objective {} cannot be normalized",
                        response.value
                    )));
                }
            }
            let f = sign * response.value / scale;
            let df: Vec<f64> = study
                .design_gradient(response.gradient)?
                .into_iter()
                .map(|g| sign * g / scale)
                .collect();
            let g = study.constraint.value(&physical, &study.element_volumes)?;
            let xd: Vec<f64> = design.iter().map(|&e| x[e]).collect();
            let update = mma_update(&xd, f, &df, &[g], &dg, &bounds, &mut mma)?;
            let change = xd
                .iter()
                .zip(&update.x)
                .fold(0.0f64, |a, (p, q)| a.max(abs(p - q)));
            let record = IterationRecord {
                iteration,
                objective: response.value,
                scaled_objective: f,
                volume_fraction: study.volume_fraction(&physical),
                constraint: g,
                change,
                f1: response.frequencies.first().copied(),
                repeated_eigenvalues: response.repeated,
                infeasible_subproblem: update.infeasible,
            };
            Ok((record, update.x))
        })();
        match step {
            Ok((record, next)) => {
                for (&e, v) in design.iter().zip(next) {
                    x[e] = v;
                }
                if let Some(obs) = observer.as_mut() {
                    obs(&record, &x);
                }
                let done = record.change < config.tolerance;
                history.push(record);
                if done {
                    termination = Termination::Converged;
                    break;
                }
            }
            Err(error) => {
                termination = Termination::Failed { iteration, error };
                break;
            }
        }
    }

    let physical = study.physical(&x)?;
    let (objective, frequencies) = match (&termination, study.evaluate(&physical)) {
        (Termination::Failed { .. }, _) | (_, Err(_)) => (None, Vec::new()),
        (_, Ok(r)) => (Some(r.value), r.frequencies),
    };
    let field = DensityField::new(physical, study.active.clone(), study.element_volumes.clone())?;
    Ok(TopoptRun {
        history,
        design: x,
        field,
        mesh: study.mesh,
        termination,
        objective,
        frequencies,
    })
}
