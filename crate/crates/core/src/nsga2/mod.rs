//! NSGA-II: elitist multi-objective search with non-dominated sorting and
//! crowding distance, binary tournaments, simulated binary crossover and
//! polynomial mutation. All objectives are minimized.
//!
//! A study is a number of independent runs whose final first fronts are
//! merged and filtered again into a [`ParetoArchive`].

mod operators;
mod sizing;
mod sorting;

pub use operators::{polynomial_mutation, sbx};
pub use sizing::{SizingObjective, SizingProblem};
pub use sorting::{crowding_distance, dominates, non_dominated_sort, Ranking};

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Nsga2Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid bounds for variable {0}")]
    Bounds(usize),
    #[error("evaluator returned {found} objectives, expected {expected}")]
    ObjectiveCount { expected: usize, found: usize },
    #[error("run {run}: {failures} evaluator failures, giving up")]
    TooManyFailures { run: usize, failures: usize },
}

/// The optimization problem seen by [`evolve`].
pub trait Problem {
    /// Box bounds of the genes.
    fn bounds(&self) -> &[(f64, f64)];

    fn n_objectives(&self) -> usize;

    /// Maps a gene vector that is inside the bounds onto the feasible set.
    fn repair(&self, _genes: &mut [f64]) {}

    fn evaluate(&self, genes: &[f64]) -> Result<Vec<f64>, String>;

    /// Evaluates one generation. Results must be in input order; override to
    /// run in parallel.
    fn evaluate_batch(&self, batch: &[Vec<f64>]) -> Vec<Result<Vec<f64>, String>> {
        batch.iter().map(|g| self.evaluate(g)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Nsga2Config {
    pub population: usize,
    /// Generations per run, counting the initial population as the first.
    pub generations: usize,
    /// Independent runs merged into the archive.
    pub runs: usize,
    pub crossover_probability: f64,
    /// SBX distribution index.
    pub crossover_index: f64,
    /// Per-gene mutation probability; `None` means 1/n.
    pub mutation_probability: Option<f64>,
    /// Polynomial mutation distribution index.
    pub mutation_index: f64,
    pub seed: u64,
    /// Evaluator failures tolerated per run before giving up.
    pub max_failures: usize,
}

impl Default for Nsga2Config {
    fn default() -> Self {
        Self {
            population: 120,
            generations: 100,
            runs: 2,
            crossover_probability: 0.9,
            crossover_index: 15.0,
            mutation_probability: None,
            mutation_index: 20.0,
            seed: 0,
            max_failures: 10_000,
        }
    }
}

impl Nsga2Config {
    pub fn evaluations_per_run(&self) -> usize {
        self.population * self.generations
    }

    fn validate(&self) -> Result<(), Nsga2Error> {
        let bad = |m: &str| Err(Nsga2Error::Config(m.into()));
        if self.population < 2 || self.population % 2 != 0 {
            return bad("population must be even and at least 2");
        }
        if self.generations == 0 || self.runs == 0 {
            return bad("generations and runs must be positive");
        }
        if !(0.0..=1.0).contains(&self.crossover_probability) {
            return bad("crossover probability must be in [0, 1]");
        }
        if let Some(p) = self.mutation_probability {
            if !(0.0..=1.0).contains(&p) {
                return bad("mutation probability must be in [0, 1]");
            }
        }
        if !(self.crossover_index >= 0.0 && self.mutation_index >= 0.0) {
            return bad("distribution indices must be non-negative");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genes: Vec<f64>,
    pub objectives: Vec<f64>,
    /// Zero-based non-domination level.
    pub rank: usize,
    pub crowding: f64,
    /// A NaN objective was returned; the individual is ranked last.
    pub invalid: bool,
    /// Run that produced the individual.
    pub run: usize,
}

/// Snapshot after each generation's survival step.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationRecord {
    pub run: usize,
    /// One-based; generation 1 is the initial population.
    pub generation: usize,
    /// Successful evaluations so far in this run.
    pub evaluations: usize,
    /// Discarded evaluations so far in this run.
    pub failures: usize,
    pub front_size: usize,
    /// Best value of each objective over the first front.
    pub best: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub run: usize,
    pub generation: usize,
    pub genes: Vec<f64>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub run: usize,
    /// Final population, ranked.
    pub population: Vec<Individual>,
    pub evaluations: usize,
    pub failures: Vec<Failure>,
}

/// Mutually non-dominated designs sorted by the first objective.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParetoArchive {
    pub members: Vec<Individual>,
}

impl ParetoArchive {
    /// Keeps the valid, non-dominated candidates, dropping repeated gene
    /// vectors, and orders them by objectives lexicographically.
    pub fn from_candidates<I: IntoIterator<Item = Individual>>(candidates: I) -> Self {
        let mut pool: Vec<Individual> = candidates.into_iter().filter(|i| !i.invalid).collect();
        pool.sort_by(|a, b| lexicographic(&a.objectives, &b.objectives).then(lexicographic(&a.genes, &b.genes)));
        pool.dedup_by(|a, b| a.genes == b.genes);
        let objectives: Vec<Vec<f64>> = pool.iter().map(|i| i.objectives.clone()).collect();
        let ranking = non_dominated_sort(&objectives);
        let Some(first) = ranking.fronts.first() else {
            return Self::default();
        };
        let mut members: Vec<Individual> = first.iter().map(|&i| pool[i].clone()).collect();
        members.sort_by(|a, b| lexicographic(&a.objectives, &b.objectives).then(lexicographic(&a.genes, &b.genes)));
        let refs: Vec<&[f64]> = members.iter().map(|m| m.objectives.as_slice()).collect();
        let crowding = crowding_distance(&refs);
        for (m, c) in members.iter_mut().zip(crowding) {
            m.rank = 0;
            m.crowding = c;
        }
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// True when some member dominates `objectives`.
    pub fn dominates(&self, objectives: &[f64]) -> bool {
        self.members.iter().any(|m| dominates(&m.objectives, objectives))
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> core::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            core::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evolution {
    pub archive: ParetoArchive,
    pub runs: Vec<RunResult>,
    pub history: Vec<GenerationRecord>,
}

/// Runs `config.runs` independent runs and merges their first fronts.
pub fn evolve<P: Problem + ?Sized>(
    problem: &P,
    config: &Nsga2Config,
    mut observer: Option<&mut dyn FnMut(&GenerationRecord)>,
) -> Result<Evolution, Nsga2Error> {
    config.validate()?;
    for (i, &(lo, hi)) in problem.bounds().iter().enumerate() {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Nsga2Error::Bounds(i));
        }
    }
    let mut runs = Vec::with_capacity(config.runs);
    let mut history = Vec::new();
    for run in 0..config.runs {
        let mut log = |r: &GenerationRecord| {
            if let Some(obs) = observer.as_mut() {
                obs(r);
            }
            history.push(r.clone());
        };
        runs.push(single_run(problem, config, run, &mut log)?);
    }
    let archive = ParetoArchive::from_candidates(
        runs.iter()
            .flat_map(|r| r.population.iter().filter(|i| i.rank == 0).cloned()),
    );
    Ok(Evolution {
        archive,
        runs,
        history,
    })
}

struct Runner<'a, P: ?Sized> {
    problem: &'a P,
    config: &'a Nsga2Config,
    run: usize,
    rng: ChaCha8Rng,
    evaluations: usize,
    failures: Vec<Failure>,
    failure_count: usize,
}

/// Failure messages kept per run; the count is always exact.
const FAILURE_LOG_LIMIT: usize = 1000;

impl<P: Problem + ?Sized> Runner<'_, P> {
    /// Evaluates candidates from `make` until `count` have succeeded.
    fn fill(
        &mut self,
        count: usize,
        generation: usize,
        mut make: impl FnMut(&mut ChaCha8Rng, usize) -> Vec<Vec<f64>>,
    ) -> Result<Vec<Individual>, Nsga2Error> {
        let m = self.problem.n_objectives();
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let batch = make(&mut self.rng, count - out.len());
            let results = self.problem.evaluate_batch(&batch);
            for (genes, result) in batch.into_iter().zip(results) {
                match result {
                    Ok(objectives) => {
                        if objectives.len() != m {
                            return Err(Nsga2Error::ObjectiveCount {
                                expected: m,
                                found: objectives.len(),
                            });
                        }
                        self.evaluations += 1;
                        out.push(Individual {
                            invalid: objectives.iter().any(|v| v.is_nan()),
                            genes,
                            objectives,
                            rank: 0,
                            crowding: 0.0,
                            run: self.run,
                        });
                    }
                    Err(message) => {
                        self.failure_count += 1;
                        if self.failures.len() < FAILURE_LOG_LIMIT {
                            self.failures.push(Failure {
                                run: self.run,
                                generation,
                                genes,
                                message,
                            });
                        }
                        if self.failure_count > self.config.max_failures {
                            return Err(Nsga2Error::TooManyFailures {
                                run: self.run,
                                failures: self.failure_count,
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

fn single_run<P: Problem + ?Sized>(
    problem: &P,
    config: &Nsga2Config,
    run: usize,
    log: &mut dyn FnMut(&GenerationRecord),
) -> Result<RunResult, Nsga2Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(run as u64);
    let mut runner = Runner {
        problem,
        config,
        run,
        rng,
        evaluations: 0,
        failures: Vec::new(),
        failure_count: 0,
    };
    let n = problem.bounds().len();
    let pm = config
        .mutation_probability
        .unwrap_or(if n == 0 { 0.0 } else { 1.0 / n as f64 });

    let mut population = {
        let bounds = problem.bounds();
        runner.fill(config.population, 1, |rng, k| {
            (0..k)
                .map(|_| {
                    let mut g: Vec<f64> = bounds
                        .iter()
                        .map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                        .collect();
                    problem.repair(&mut g);
                    g
                })
                .collect()
        })?
    };
    population = survive(population, config.population);
    log(&record(&runner, 1, &population));

    for generation in 2..=config.generations {
        let parents = &population;
        let bounds = problem.bounds();
        let offspring = runner.fill(config.population, generation, |rng, k| {
            let mut children = Vec::with_capacity(k + 1);
            while children.len() < k {
                let mut a = tournament(parents, rng).genes.clone();
                let mut b = tournament(parents, rng).genes.clone();
                if rng.random::<f64>() < config.crossover_probability {
                    sbx(&mut a, &mut b, bounds, config.crossover_index, rng);
                }
                for child in [&mut a, &mut b] {
                    polynomial_mutation(child, bounds, pm, config.mutation_index, rng);
                    problem.repair(child);
                }
                children.push(a);
                children.push(b);
            }
            children.truncate(k);
            children
        })?;
        let mut combined = population;
        combined.extend(offspring);
        population = survive(combined, config.population);
        log(&record(&runner, generation, &population));
    }

    Ok(RunResult {
        run,
        population,
        evaluations: runner.evaluations,
        failures: runner.failures,
    })
}

fn record<P: ?Sized>(runner: &Runner<'_, P>, generation: usize, population: &[Individual]) -> GenerationRecord {
    let first: Vec<&Individual> = population.iter().filter(|i| i.rank == 0 && !i.invalid).collect();
    let m = population.first().map_or(0, |i| i.objectives.len());
    let best = (0..m)
        .map(|k| first.iter().map(|i| i.objectives[k]).fold(f64::INFINITY, f64::min))
        .collect();
    GenerationRecord {
        run: runner.run,
        generation,
        evaluations: runner.evaluations,
        failures: runner.failure_count,
        front_size: first.len(),
        best,
    }
}

/// Binary tournament on rank, then crowding, then a coin flip.
fn tournament<'p, R: Rng + ?Sized>(population: &'p [Individual], rng: &mut R) -> &'p Individual {
    let a = &population[rng.random_range(0..population.len())];
    let b = &population[rng.random_range(0..population.len())];
    if a.rank != b.rank {
        return if a.rank < b.rank { a } else { b };
    }
    if a.crowding != b.crowding {
        return if a.crowding > b.crowding { a } else { b };
    }
    if rng.random::<bool>() {
        a
    } else {
        b
    }
}

/// Elitist truncation of the merged population to `size`, filling whole
/// fronts and then the most isolated members of the first front that does
/// not fit. Survivors carry the rank and crowding used for selection.
fn survive(mut pool: Vec<Individual>, size: usize) -> Vec<Individual> {
    let objectives: Vec<Vec<f64>> = pool.iter().map(|i| i.objectives.clone()).collect();
    let ranking = non_dominated_sort(&objectives);
    let invalid_front = if ranking.invalid.is_empty() {
        usize::MAX
    } else {
        ranking.fronts.len() - 1
    };
    for (r, front) in ranking.fronts.iter().enumerate() {
        let crowding = if r == invalid_front {
            vec![0.0; front.len()]
        } else {
            let refs: Vec<&[f64]> = front.iter().map(|&i| objectives[i].as_slice()).collect();
            crowding_distance(&refs)
        };
        for (&i, c) in front.iter().zip(crowding) {
            pool[i].rank = r;
            pool[i].crowding = c;
        }
    }
    let mut keep = Vec::with_capacity(size);
    for front in &ranking.fronts {
        if keep.len() + front.len() <= size {
            keep.extend_from_slice(front);
            continue;
        }
        let mut last = front.clone();
        last.sort_by(|&a, &b| pool[b].crowding.total_cmp(&pool[a].crowding).then(a.cmp(&b)));
        last.truncate(size - keep.len());
        keep.extend(last);
        break;
    }
    keep.sort_unstable();
    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    keep.iter().map(|&i| slots[i].take().expect("unique index")).collect()
}
