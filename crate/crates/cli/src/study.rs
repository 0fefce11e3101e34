//! Running studies and writing their artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use prismopt_core::fem2d::MassInterpolation;
use prismopt_core::nsga2::{evolve, Evolution, GenerationRecord, Individual, Problem, SizingObjective, SizingProblem};
use prismopt_core::sandwich::CoreType;
use prismopt_core::topopt::{run_topopt, IterationRecord, Termination, TopoptConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::artifacts::{
    read_density_csv, read_rows, sha256_file, write_density_csv, write_pgm, write_rows, write_text, DensityGrid,
    FailureRow, ParetoRow, SizingHistoryRow, TopoptHistoryRow,
};
use crate::config::{Mode, ObjectiveKind, StudyConfig};
use crate::plot::{Plot, Series, Style};

/// Overrides the directory that relative `output_dir` values resolve
/// against (default: the working directory).
pub const OUTPUT_ROOT_ENV: &str = "PRISMOPT_OUTPUT_ROOT";
pub const MANIFEST: &str = "manifest.json";
/// Present only when a run stopped on an error.
pub const FAILURE_MARKER: &str = "FAILED";

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads for evaluations; `None` lets rayon decide.
    pub jobs: Option<usize>,
    /// Replaces the configured output directory.
    pub output_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Completed,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactEntry {
    pub file: String,
    pub sha256: String,
}

/// Run metadata. Everything except `wall_time_s` and `jobs` is a function
/// of the configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub status: Status,
    pub config: StudyConfig,
    pub seed: u64,
    /// Resolved solver settings, defaults included.
    pub settings: serde_json::Value,
    pub summary: serde_json::Value,
    pub artifacts: Vec<ArtifactEntry>,
    pub jobs: usize,
    pub wall_time_s: f64,
}

impl Manifest {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Clone, Debug)]
pub struct StudyReport {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

impl StudyReport {
    pub fn failed(&self) -> bool {
        self.manifest.status == Status::Failed
    }
}

pub fn resolve_output_dir(config: &StudyConfig, options: &RunOptions) -> PathBuf {
    if let Some(dir) = &options.output_dir {
        return dir.clone();
    }
    let dir = PathBuf::from(&config.output_dir);
    if dir.is_absolute() {
        return dir;
    }
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) => PathBuf::from(root).join(dir),
        None => dir,
    }
}

/// Runs a validated study. `Err` means the study could not run at all or an
/// artifact could not be written; a study that stopped on a solver error
/// returns a report with [`Status::Failed`] and partial artifacts.
pub fn run_study(config: &StudyConfig, options: &RunOptions) -> anyhow::Result<StudyReport> {
    config.validate()?;
    let dir = resolve_output_dir(config, options);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let marker = dir.join(FAILURE_MARKER);
    if marker.exists() {
        fs::remove_file(&marker)?;
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = options.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build()?;
    let jobs = pool.current_num_threads();
    let start = Instant::now();
    let outcome = pool.install(|| match config.mode {
        Mode::Topopt => run_topopt_study(config, &dir),
        Mode::Sizing => run_sizing_study(config, &dir),
    })?;
    if let Some(message) = &outcome.failure {
        write_text(&marker, &format!("{message}\n"))?;
    }
    let mut artifacts = Vec::new();
    for file in &outcome.files {
        artifacts.push(ArtifactEntry {
            file: file.clone(),
            sha256: sha256_file(&dir.join(file))?,
        });
    }
    let manifest = Manifest {
        tool: "prismopt".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        status: if outcome.failure.is_some() {
            Status::Failed
        } else {
            Status::Completed
        },
        config: config.clone(),
        seed: config.seed,
        settings: outcome.settings,
        summary: outcome.summary,
        artifacts,
        jobs,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    write_text(&dir.join(MANIFEST), &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
    Ok(StudyReport { dir, manifest })
}

struct Outcome {
    files: Vec<String>,
    settings: serde_json::Value,
    summary: serde_json::Value,
    failure: Option<String>,
}

fn topopt_settings(c: &TopoptConfig) -> serde_json::Value {
    let mass = match c.mass_scheme {
        MassInterpolation::Piecewise { threshold } => json!({ "scheme": "piecewise", "threshold": threshold }),
        MassInterpolation::Linear => json!({ "scheme": "linear" }),
        MassInterpolation::StiffnessPower => json!({ "scheme": "stiffness-power" }),
    };
    json!({
        "length": c.length,
        "domain_length": c.domain_length(),
        "height": c.height,
        "element_size": c.element_size,
        "pressure": c.pressure,
        "joints": c.joints.map(|j| json!({ "span": j.span, "clamp_band": [j.clamp_band.0, j.clamp_band.1] })),
        "material": {
            "e0": c.material.e0, "nu": c.material.nu, "rho": c.material.rho,
            "e_min": c.material.e_min, "pl": c.material.pl, "ql": c.material.ql,
        },
        "mass_interpolation": mass,
        "objective": format!("{:?}", c.objective),
        "volume_fraction": c.volume_fraction,
        "filter_radius": c.filter_radius,
        "face_layers": c.face_layers,
        "x_min": c.x_min,
        "move_limit": c.move_limit,
        "tolerance": c.tolerance,
        "max_iterations": c.max_iterations(),
        "eigen_tolerance": c.eigen.tolerance,
        "optimizer": "MMA",
    })
}

fn run_topopt_study(config: &StudyConfig, dir: &Path) -> anyhow::Result<Outcome> {
    let tc = config.topopt();
    let mut rows = Vec::new();
    let mut observer = |r: &IterationRecord, _: &[f64]| rows.push(history_row(r));
    let run = run_topopt(&tc, Some(&mut observer)).context("setting up the topology optimization")?;
    write_rows(&dir.join("history.csv"), &rows)?;
    let mesh = &run.mesh;
    let grid = DensityGrid::from_mesh_order(mesh.nx, mesh.ny, &run.field.x, |ix, iy| mesh.element_index(ix, iy));
    write_density_csv(&dir.join("density_final.csv"), &grid)?;
    render_topopt(dir, config.objective, &grid, &rows)?;

    let (termination, failure) = match &run.termination {
        Termination::Converged => ("converged".to_string(), None),
        Termination::MaxIterations => ("max_iterations".to_string(), None),
        Termination::Failed { iteration, error } => (
            "failed".to_string(),
            Some(format!("iteration {iteration}: {error}")),
        ),
    };
    Ok(Outcome {
        files: ["history.csv", "density_final.csv", "density_final.pgm", "convergence.svg"]
            .map(String::from)
            .to_vec(),
        settings: topopt_settings(&tc),
        summary: json!({
            "termination": termination,
            "iterations": run.iterations(),
            "objective": run.objective,
            "volume_fraction": run.field.volume_fraction(),
            "frequencies_hz": run.frequencies,
            "grid": [mesh.nx, mesh.ny],
        }),
        failure,
    })
}

fn history_row(r: &IterationRecord) -> TopoptHistoryRow {
    TopoptHistoryRow {
        iteration: r.iteration,
        objective: r.objective,
        scaled_objective: r.scaled_objective,
        volume_fraction: r.volume_fraction,
        constraint: r.constraint,
        change: r.change,
        f1: r.f1,
        repeated_eigenvalues: r.repeated_eigenvalues,
        infeasible_subproblem: r.infeasible_subproblem,
    }
}

fn render_topopt(dir: &Path, objective: ObjectiveKind, grid: &DensityGrid, rows: &[TopoptHistoryRow]) -> anyhow::Result<()> {
    write_pgm(&dir.join("density_final.pgm"), grid)?;
    let (label, points): (&str, Vec<(f64, f64)>) = match objective {
        ObjectiveKind::Stress => (
            "p-norm stress / initial",
            rows.iter().map(|r| (r.iteration as f64, r.scaled_objective)).collect(),
        ),
        ObjectiveKind::Frequency => (
            "f1 (Hz)",
            rows.iter().map(|r| (r.iteration as f64, r.f1.unwrap_or(f64::NAN))).collect(),
        ),
    };
    let plot = Plot {
        title: "Topology optimization history",
        x_label: "iteration",
        y_label: label,
        log_y: false,
        series: vec![Series {
            label,
            points,
            style: Style::Line,
        }],
    };
    write_text(&dir.join("convergence.svg"), &plot.to_svg())
}

/// Evaluates each generation on the rayon pool, keeping input order.
struct Parallel<'a, P>(&'a P);

impl<P: Problem + Sync> Problem for Parallel<'_, P> {
    fn bounds(&self) -> &[(f64, f64)] {
        self.0.bounds()
    }
    fn n_objectives(&self) -> usize {
        self.0.n_objectives()
    }
    fn repair(&self, genes: &mut [f64]) {
        self.0.repair(genes)
    }
    fn evaluate(&self, genes: &[f64]) -> Result<Vec<f64>, String> {
        self.0.evaluate(genes)
    }
    fn evaluate_batch(&self, batch: &[Vec<f64>]) -> Vec<Result<Vec<f64>, String>> {
        batch.par_iter().map(|g| self.0.evaluate(g)).collect()
    }
}

/// Runs a sizing study in-process and returns the raw evolution.
pub fn sizing_evolution(
    config: &StudyConfig,
    observer: Option<&mut dyn FnMut(&GenerationRecord)>,
) -> anyhow::Result<(SizingProblem, Result<Evolution, prismopt_core::nsga2::Nsga2Error>)> {
    let Some(core) = config.core() else {
        bail!("sizing study without a core type");
    };
    let mut problem = SizingProblem::new(core, config.with_joints, config.sizing_objective());
    problem.load = config.load;
    problem.length = config.domain.length;
    let evo = evolve(&Parallel(&problem), &config.nsga2(), observer);
    Ok((problem, evo))
}

fn run_sizing_study(config: &StudyConfig, dir: &Path) -> anyhow::Result<Outcome> {
    let objective = config.sizing_objective();
    let mut history = Vec::new();
    let mut observer = |r: &GenerationRecord| history.push(generation_row(r, objective));
    let (problem, evo) = sizing_evolution(config, Some(&mut observer))?;
    let nsga = config.nsga2();
    let settings = json!({
        "core_type": problem.core_type.name(),
        "with_joints": problem.with_joints,
        "variables": problem.variables().iter().map(|v| v.name()).collect::<Vec<_>>(),
        "bounds_mm": problem.bounds(),
        "load": problem.load,
        "length": problem.length,
        "population": nsga.population,
        "generations": nsga.generations,
        "runs": nsga.runs,
        "evaluations_per_run": nsga.evaluations_per_run(),
        "crossover": { "operator": "SBX", "probability": nsga.crossover_probability, "index": nsga.crossover_index },
        "mutation": {
            "operator": "polynomial",
            "probability": nsga.mutation_probability.unwrap_or(1.0 / problem.bounds().len() as f64),
            "index": nsga.mutation_index,
        },
        "selection": "binary tournament on rank, then crowding distance",
        "survival": "elitist (mu + lambda)",
        "rng": "ChaCha8, seeded with the study seed, stream = run index",
        "y_core_coupling": "proportional repair onto h_h + h_l = 37",
    });

    let mut files = vec!["history.csv".to_string()];
    write_rows(&dir.join("history.csv"), &history)?;
    let evo = match evo {
        Ok(evo) => evo,
        Err(e) => {
            render_sizing(dir, config, None, &history)?;
            files.push("convergence.svg".into());
            return Ok(Outcome {
                files,
                settings,
                summary: json!({ "error": e.to_string() }),
                failure: Some(e.to_string()),
            });
        }
    };

    let rows: Vec<ParetoRow> = evo
        .archive
        .members
        .iter()
        .map(|m| pareto_row(&problem, m, objective))
        .collect();
    write_rows(&dir.join("pareto.csv"), &rows)?;
    let failures: Vec<FailureRow> = evo
        .runs
        .iter()
        .flat_map(|r| r.failures.iter())
        .map(|f| FailureRow {
            run: f.run,
            generation: f.generation,
            genes: f.genes.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" "),
            message: f.message.clone(),
        })
        .collect();
    render_sizing(dir, config, Some(&rows), &history)?;
    files.extend(["pareto.csv", "front.svg", "convergence.svg"].map(String::from));
    if !failures.is_empty() {
        write_rows(&dir.join("failures.csv"), &failures)?;
        files.push("failures.csv".into());
    }
    let per_run: Vec<_> = evo
        .runs
        .iter()
        .map(|r| {
            json!({
                "run": r.run,
                "evaluations": r.evaluations,
                "failures": history.iter().filter(|h| h.run == r.run).map(|h| h.failures).max().unwrap_or(0),
                "front_size": r.population.iter().filter(|i| i.rank == 0).count(),
            })
        })
        .collect();
    Ok(Outcome {
        files,
        settings,
        summary: json!({ "archive_size": rows.len(), "runs": per_run }),
        failure: None,
    })
}

fn generation_row(r: &GenerationRecord, objective: SizingObjective) -> SizingHistoryRow {
    let second = r.best.get(1).copied();
    SizingHistoryRow {
        run: r.run,
        generation: r.generation,
        evaluations: r.evaluations,
        failures: r.failures,
        front_size: r.front_size,
        best_area_density: r.best.first().copied().unwrap_or(f64::NAN),
        best_max_vm: second.filter(|_| objective == SizingObjective::Stress),
        best_f1: second.filter(|_| objective == SizingObjective::Frequency).map(|v| -v),
    }
}

pub fn pareto_row(problem: &SizingProblem, member: &Individual, objective: SizingObjective) -> ParetoRow {
    let d = problem.design(&member.genes);
    let y = d.core_type == CoreType::Y;
    ParetoRow {
        run: member.run,
        core_type: d.core_type.name().into(),
        t_f: d.t_f,
        t_w: d.t_w,
        h_c: d.core_height(),
        h_h: y.then_some(d.h_h),
        h_l: y.then_some(d.h_l),
        s: d.s,
        t_j: d.with_joints.then_some(d.t_j),
        area_density: member.objectives[0],
        max_vm: (objective == SizingObjective::Stress).then_some(member.objectives[1]),
        f1: (objective == SizingObjective::Frequency).then(|| -member.objectives[1]),
    }
}

fn render_sizing(
    dir: &Path,
    config: &StudyConfig,
    rows: Option<&[ParetoRow]>,
    history: &[SizingHistoryRow],
) -> anyhow::Result<()> {
    let core = config.core_type.as_deref().unwrap_or("?");
    let stress = config.objective == ObjectiveKind::Stress;
    if let Some(rows) = rows {
        let points = rows
            .iter()
            .map(|r| {
                let y = if stress {
                    r.max_vm.unwrap_or(f64::NAN) / 1e6
                } else {
                    r.f1.unwrap_or(f64::NAN)
                };
                (r.area_density, y)
            })
            .collect();
        let plot = Plot {
            title: &format!("Pareto front, {core} core"),
            x_label: "area density (kg/m²)",
            y_label: if stress { "max von Mises stress (MPa)" } else { "f1 (Hz)" },
            log_y: false,
            series: vec![Series {
                label: "archive",
                points,
                style: Style::Markers,
            }],
        };
        write_text(&dir.join("front.svg"), &plot.to_svg())?;
    }
    let runs: Vec<usize> = {
        let mut r: Vec<usize> = history.iter().map(|h| h.run).collect();
        r.dedup();
        r
    };
    let labels: Vec<String> = runs.iter().map(|r| format!("run {r}")).collect();
    let series = runs
        .iter()
        .zip(&labels)
        .map(|(&run, label)| Series {
            label,
            points: history
                .iter()
                .filter(|h| h.run == run)
                .map(|h| {
                    let y = if stress {
                        h.best_max_vm.unwrap_or(f64::NAN) / 1e6
                    } else {
                        h.best_f1.unwrap_or(f64::NAN)
                    };
                    (h.generation as f64, y)
                })
                .collect(),
            style: Style::Line,
        })
        .collect();
    let plot = Plot {
        title: &format!("Best {} per generation, {core} core", if stress { "stress" } else { "f1" }),
        x_label: "generation",
        y_label: if stress { "min max stress (MPa)" } else { "max f1 (Hz)" },
        log_y: false,
        series,
    };
    write_text(&dir.join("convergence.svg"), &plot.to_svg())
}

/// Re-renders images and plots of a finished run from its CSV artifacts
/// into `to` (the run directory itself by default). Returns the files
/// written.
pub fn export(run_dir: &Path, to: Option<&Path>) -> anyhow::Result<Vec<PathBuf>> {
    let manifest = Manifest::load(&run_dir.join(MANIFEST))?;
    let out = to.unwrap_or(run_dir);
    fs::create_dir_all(out)?;
    let config = &manifest.config;
    match config.mode {
        Mode::Topopt => {
            let grid = read_density_csv(&run_dir.join("density_final.csv"))?;
            let rows: Vec<TopoptHistoryRow> = read_rows(&run_dir.join("history.csv"))?;
            render_topopt(out, config.objective, &grid, &rows)?;
            Ok(vec![out.join("density_final.pgm"), out.join("convergence.svg")])
        }
        Mode::Sizing => {
            let history: Vec<SizingHistoryRow> = read_rows(&run_dir.join("history.csv"))?;
            let pareto = run_dir.join("pareto.csv");
            let mut files = vec![out.join("convergence.svg")];
            if pareto.exists() {
                let rows: Vec<ParetoRow> = read_rows(&pareto)?;
                render_sizing(out, config, Some(&rows), &history)?;
                files.insert(0, out.join("front.svg"));
            } else {
                render_sizing(out, config, None, &history)?;
            }
            Ok(files)
        }
    }
}
