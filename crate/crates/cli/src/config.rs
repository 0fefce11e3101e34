//! Study files: TOML with a fixed schema.
//!
//! ```toml
//! mode = "topopt"            # or "sizing"
//! objective = "frequency"    # or "stress"
//! seed = 7
//! output_dir = "runs/freq-vf30"
//! load = 50e3                # Pa on the top face
//! with_joints = false
//! volume_fraction = 0.3      # topopt only
//! # core_type = "web"        # sizing only: web, corrugated, x, y
//!
//! [domain]                   # metres
//! length = 1.0
//! height = 0.045             # topopt only
//! element_size = 0.001       # topopt only
//!
//! [solver]                   # every key optional
//! max_iterations = 300
//! ```

use std::fmt;
use std::path::Path;

use prismopt_core::fem2d::MassInterpolation;
use prismopt_core::nsga2::{Nsga2Config, SizingObjective};
use prismopt_core::sandwich::CoreType;
use prismopt_core::topopt::{JointSpec, Objective, TopoptConfig};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Topopt,
    Sizing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Stress,
    Frequency,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MassScheme {
    /// `x` above 0.1, `x^6` at or below.
    Piecewise,
    Linear,
    /// `x^3`, the naive choice that admits localized modes.
    StiffnessPower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub length: f64,
    pub height: Option<f64>,
    pub element_size: Option<f64>,
}

/// Optional solver settings. Missing values take the library defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solver {
    // Topology optimization.
    pub max_iterations: Option<usize>,
    pub tolerance: Option<f64>,
    pub move_limit: Option<f64>,
    pub filter_radius: Option<f64>,
    pub face_layers: Option<usize>,
    pub mass_scheme: Option<MassScheme>,
    pub eigen_tolerance: Option<f64>,
    // Sizing.
    pub population: Option<usize>,
    pub generations: Option<usize>,
    pub runs: Option<usize>,
    pub crossover_probability: Option<f64>,
    pub crossover_index: Option<f64>,
    pub mutation_probability: Option<f64>,
    pub mutation_index: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub mode: Mode,
    pub objective: ObjectiveKind,
    pub seed: u64,
    pub output_dir: String,
    pub load: f64,
    #[serde(default)]
    pub with_joints: bool,
    pub volume_fraction: Option<f64>,
    pub core_type: Option<String>,
    pub domain: Domain,
    #[serde(default)]
    pub solver: Solver,
}

/// A problem with a study file, pointing at the offending key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: `{}`: {}", self.field, self.message),
            None => write!(f, "`{}`: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Every problem found in one file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

impl StudyConfig {
    pub fn load(path: &Path) -> anyhow::Result<Result<Self, ConfigErrors>> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::parse(&text))
    }

    /// Parses and validates a study file.
    pub fn parse(text: &str) -> Result<Self, ConfigErrors> {
        let config: Self = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            ConfigErrors(vec![ConfigError {
                field: "<file>".into(),
                line,
                message: e.message().trim().to_string(),
            }])
        })?;
        config.validate_with(Some(text))?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigErrors> {
        self.validate_with(None)
    }

    fn validate_with(&self, text: Option<&str>) -> Result<(), ConfigErrors> {
        let mut errors = Vec::new();
        let mut err = |field: &str, message: String| {
            let key = field.rsplit('.').next().unwrap_or(field);
            errors.push(ConfigError {
                field: field.into(),
                line: text.and_then(|t| line_of(t, key)),
                message,
            });
        };
        let positive = |v: f64| v.is_finite() && v > 0.0;

        if !(self.load.is_finite() && self.load >= 0.0) {
            err("load", format!("must be a non-negative pressure in Pa, got {}", self.load));
        }
        if self.output_dir.trim().is_empty() {
            err("output_dir", "must not be empty".into());
        }
        if !positive(self.domain.length) {
            err("domain.length", format!("must be positive, got {}", self.domain.length));
        }
        match self.mode {
            Mode::Topopt => {
                match self.volume_fraction {
                    None => err("volume_fraction", "missing; required when mode = \"topopt\"".into()),
                    Some(v) if !(v > 0.0 && v <= 1.0) => {
                        err("volume_fraction", format!("must be in (0, 1], got {v}"))
                    }
                    _ => {}
                }
                match self.domain.height {
                    None => err("domain.height", "missing; required when mode = \"topopt\"".into()),
                    Some(h) if !positive(h) => err("domain.height", format!("must be positive, got {h}")),
                    _ => {}
                }
                match self.domain.element_size {
                    None => err(
                        "domain.element_size",
                        "missing; required when mode = \"topopt\"".into(),
                    ),
                    Some(h) if !positive(h) => {
                        err("domain.element_size", format!("must be positive, got {h}"))
                    }
                    _ => {}
                }
                if let (Some(h), Some(size)) = (self.domain.height, self.domain.element_size) {
                    let length = self.topopt().domain_length();
                    for (field, extent) in [("domain.length", length), ("domain.height", h)] {
                        if positive(extent) && positive(size) && !divides(extent, size) {
                            err(
                                "domain.element_size",
                                format!("{size} m does not divide {field} = {extent} m into whole elements"),
                            );
                        }
                    }
                }
                if self.core_type.is_some() {
                    err("core_type", "only used when mode = \"sizing\"".into());
                }
            }
            Mode::Sizing => {
                match self.core_type.as_deref() {
                    None => err("core_type", "missing; required when mode = \"sizing\"".into()),
                    Some(c) if CoreType::parse(c).is_none() => err(
                        "core_type",
                        format!("unknown core type {c:?}; expected web, corrugated, x or y"),
                    ),
                    _ => {}
                }
                if self.volume_fraction.is_some() {
                    err("volume_fraction", "only used when mode = \"topopt\"".into());
                }
            }
        }
        let s = &self.solver;
        for (name, v) in [
            ("solver.tolerance", s.tolerance),
            ("solver.move_limit", s.move_limit),
            ("solver.filter_radius", s.filter_radius),
            ("solver.eigen_tolerance", s.eigen_tolerance),
        ] {
            if let Some(v) = v {
                if !positive(v) {
                    err(name, format!("must be positive, got {v}"));
                }
            }
        }
        for (name, v) in [
            ("solver.max_iterations", s.max_iterations),
            ("solver.population", s.population),
            ("solver.generations", s.generations),
            ("solver.runs", s.runs),
        ] {
            if v == Some(0) {
                err(name, "must be positive".into());
            }
        }
        if let Some(p) = s.population {
            if p % 2 != 0 {
                err("solver.population", format!("must be even, got {p}"));
            }
        }
        for (name, v) in [
            ("solver.crossover_probability", s.crossover_probability),
            ("solver.mutation_probability", s.mutation_probability),
        ] {
            if let Some(v) = v {
                if !(0.0..=1.0).contains(&v) {
                    err(name, format!("must be in [0, 1], got {v}"));
                }
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigErrors(errors))
        }
    }

    /// The topology optimization problem. Call on validated topopt configs.
    pub fn topopt(&self) -> TopoptConfig {
        let objective = match self.objective {
            ObjectiveKind::Stress => Objective::stress(),
            ObjectiveKind::Frequency => Objective::frequency(),
        };
        let mut c = TopoptConfig::beam(objective, self.volume_fraction.unwrap_or(0.3));
        c.length = self.domain.length;
        c.height = self.domain.height.unwrap_or(c.height);
        c.element_size = self.domain.element_size.unwrap_or(c.element_size);
        c.pressure = self.load;
        c.joints = self.with_joints.then(JointSpec::default);
        let s = &self.solver;
        c.max_iterations = s.max_iterations;
        c.tolerance = s.tolerance.unwrap_or(c.tolerance);
        c.move_limit = s.move_limit.unwrap_or(c.move_limit);
        c.filter_radius = s.filter_radius.unwrap_or(c.filter_radius);
        c.face_layers = s.face_layers.unwrap_or(c.face_layers);
        if let Some(t) = s.eigen_tolerance {
            c.eigen.tolerance = t;
        }
        c.mass_scheme = match s.mass_scheme.unwrap_or(MassScheme::Piecewise) {
            MassScheme::Piecewise => MassInterpolation::default(),
            MassScheme::Linear => MassInterpolation::Linear,
            MassScheme::StiffnessPower => MassInterpolation::StiffnessPower,
        };
        c
    }

    pub fn core(&self) -> Option<CoreType> {
        self.core_type.as_deref().and_then(CoreType::parse)
    }

    pub fn sizing_objective(&self) -> SizingObjective {
        match self.objective {
            ObjectiveKind::Stress => SizingObjective::Stress,
            ObjectiveKind::Frequency => SizingObjective::Frequency,
        }
    }

    pub fn nsga2(&self) -> Nsga2Config {
        let d = Nsga2Config::default();
        let s = &self.solver;
        Nsga2Config {
            population: s.population.unwrap_or(d.population),
            generations: s.generations.unwrap_or(d.generations),
            runs: s.runs.unwrap_or(d.runs),
            crossover_probability: s.crossover_probability.unwrap_or(d.crossover_probability),
            crossover_index: s.crossover_index.unwrap_or(d.crossover_index),
            mutation_probability: s.mutation_probability.or(d.mutation_probability),
            mutation_index: s.mutation_index.unwrap_or(d.mutation_index),
            seed: self.seed,
            max_failures: d.max_failures,
        }
    }
}

fn divides(extent: f64, size: f64) -> bool {
    let ratio = extent / size;
    ratio.round() >= 1.0 && (ratio - ratio.round()).abs() <= 1e-9 * ratio.max(1.0)
}

/// One-based line of the first `key = …` assignment.
fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}
