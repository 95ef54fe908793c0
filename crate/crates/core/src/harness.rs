//! Seeded trials, experiment campaigns and error bookkeeping.
//!
//! Every trial draws from its own RNG stream keyed by
//! `(base_seed, algorithm, function, trial_index)`, so results do not depend
//! on which other cells are part of the campaign, on their order, or on the
//! number of worker threads.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{random_rotation, random_shift, Catalog, Transform};
use crate::de::{de_generation, DeControl, DeStrategy, JdeConfig};
use crate::error::{Error, Result};
use crate::gwo::gwo_generation;
use crate::hybrid::{run_gwo_de, ModeSwitch, SwitchThresholds};
use crate::objective::{Evaluator, Objective};
use crate::population::{uniform_init, Population, SearchSpace, MIN_POPULATION};
use crate::rng::{stable_seed, RngStream};

/// Errors below this are reported as exactly zero.
pub const ERROR_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub np: usize,
    pub max_iterations: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub dimension: usize,
    pub thresholds: SwitchThresholds,
    /// F and CR of the fixed-parameter DE/best/1/bin phase and algorithm.
    pub de: DeControl,
    pub jde: JdeConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            np: 200,
            max_iterations: 1000,
            trials: 50,
            base_seed: 0,
            dimension: 30,
            thresholds: SwitchThresholds::default(),
            de: DeControl::default(),
            jde: JdeConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.np < MIN_POPULATION {
            return Err(Error::config(format!(
                "np must be at least {MIN_POPULATION}, got {}",
                self.np
            )));
        }
        if self.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        if self.dimension == 0 {
            return Err(Error::config("dimension must be at least 1"));
        }
        DeControl::new(self.de.f, self.de.cr)?;
        self.jde.validate()
    }

    /// Objective evaluations per trial, initialisation included.
    pub fn budget(&self) -> u64 {
        (self.np as u64) * (self.max_iterations as u64 + 1)
    }
}

/// The record of one seeded run. Equality ignores `wall_time`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TrialTrace {
    pub algorithm: String,
    pub function: String,
    pub trial_index: u64,
    pub seed: u64,
    /// Best-so-far fitness after initialisation and after every generation.
    pub best_per_generation: Vec<f64>,
    pub evaluations_used: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_timeline: Option<Vec<ModeSwitch>>,
    pub best_position: Vec<f64>,
    /// Seconds; hardware dependent and never serialized with the data.
    #[serde(skip)]
    pub wall_time: f64,
}

impl PartialEq for TrialTrace {
    fn eq(&self, other: &Self) -> bool {
        self.algorithm == other.algorithm
            && self.function == other.function
            && self.trial_index == other.trial_index
            && self.seed == other.seed
            && self.best_per_generation == other.best_per_generation
            && self.evaluations_used == other.evaluations_used
            && self.mode_timeline == other.mode_timeline
            && self.best_position == other.best_position
    }
}

impl TrialTrace {
    pub fn final_best(&self) -> f64 {
        self.best_per_generation.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// Anything that can run a seeded optimisation to a fixed budget.
pub trait Optimizer: Send + Sync {
    fn name(&self) -> &str;

    fn run(
        &self,
        config: &RunConfig,
        objective: &dyn Objective,
        space: &SearchSpace,
        rng: &mut RngStream,
    ) -> Result<TrialTrace>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Gwo,
    DeBest1Bin,
    Jde,
    GwoDe,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::GwoDe,
        Algorithm::Gwo,
        Algorithm::Jde,
        Algorithm::DeBest1Bin,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Gwo => "gwo",
            Algorithm::DeBest1Bin => "de_best_1_bin",
            Algorithm::Jde => "jde",
            Algorithm::GwoDe => "gwo_de",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::config(format!("unknown algorithm `{s}`")))
    }
}

/// Initialise, then apply `step` for `max_iterations` generations while
/// tracking the best-so-far fitness.
fn run_generational<F>(
    config: &RunConfig,
    objective: &dyn Objective,
    space: &SearchSpace,
    rng: &mut RngStream,
    mut step: F,
) -> Result<TrialTrace>
where
    F: FnMut(&Population, usize, &mut RngStream, &mut Evaluator<'_>) -> Result<Population>,
{
    config.validate()?;
    Error::check_dim(space.dimension(), objective.dimension())?;
    let started = Instant::now();
    let mut init_rng = rng.fork(0);
    let mut evolve_rng = rng.fork(1);
    let mut eval = Evaluator::new(objective);

    let mut pop = uniform_init(space, config.np, &mut init_rng)?;
    eval.evaluate_population(&mut pop)?;
    let mut best = pop.best()?.clone();
    let mut history = Vec::with_capacity(config.max_iterations + 1);
    history.push(best.fitness()?);

    for t in 0..config.max_iterations {
        pop = step(&pop, t, &mut evolve_rng, &mut eval)?;
        let candidate = pop.best()?;
        if candidate.fitness()? < best.fitness()? {
            best = candidate.clone();
        }
        history.push(best.fitness()?);
    }

    Ok(TrialTrace {
        seed: rng.seed(),
        best_per_generation: history,
        evaluations_used: eval.count(),
        best_position: best.position,
        wall_time: started.elapsed().as_secs_f64(),
        ..TrialTrace::default()
    })
}

impl Optimizer for Algorithm {
    fn name(&self) -> &str {
        self.as_str()
    }

    fn run(
        &self,
        config: &RunConfig,
        objective: &dyn Objective,
        space: &SearchSpace,
        rng: &mut RngStream,
    ) -> Result<TrialTrace> {
        let t_max = config.max_iterations;
        let mut de_run = |strategy| {
            run_generational(config, objective, space, rng, |pop, _, r, e| {
                de_generation(pop, strategy, &config.de, &config.jde, r, e, space)
            })
        };
        match self {
            Algorithm::GwoDe => run_gwo_de(config, objective, space, rng),
            Algorithm::Gwo => run_generational(config, objective, space, rng, |pop, t, r, e| {
                gwo_generation(pop, t, t_max, r, e, space)
            }),
            Algorithm::DeBest1Bin => de_run(DeStrategy::Best1),
            Algorithm::Jde => de_run(DeStrategy::Jde),
        }
    }
}

/// A named objective together with its search box and known optimum value.
pub struct Problem {
    pub name: String,
    pub objective: Box<dyn Objective>,
    pub space: SearchSpace,
    pub f_star: f64,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dimension", &self.space.dimension())
            .field("f_star", &self.f_star)
            .finish()
    }
}

impl Problem {
    /// Resolves a function name against `catalog`.
    ///
    /// Plain names select catalog functions on their default box. The
    /// prefixes `shifted/` and `shifted_rotated/` wrap a catalog function in
    /// a [`Transform`] whose shift (and rotation) is derived from
    /// `base_seed` and the full name.
    pub fn resolve(catalog: &Catalog, name: &str, dimension: usize, base_seed: u64) -> Result<Self> {
        let (base_name, rotate) = if let Some(rest) = name.strip_prefix("shifted_rotated/") {
            (rest, Some(true))
        } else if let Some(rest) = name.strip_prefix("shifted/") {
            (rest, Some(false))
        } else {
            (name, None)
        };
        let base = catalog.instantiate(base_name, dimension)?;
        match rotate {
            None => Ok(Problem {
                name: name.to_owned(),
                space: base.space().clone(),
                f_star: base.f_star(),
                objective: Box::new(base),
            }),
            Some(rotate) => {
                let mut rng = RngStream::new(stable_seed(base_seed, &["transform", name], 0), 0);
                let shift = random_shift(dimension, &mut rng);
                let rotation = if rotate { Some(random_rotation(dimension, &mut rng)?) } else { None };
                let t = Transform::new(base, shift, rotation)?;
                Ok(Problem {
                    name: name.to_owned(),
                    space: t.space().clone(),
                    f_star: t.f_star(),
                    objective: Box::new(t),
                })
            }
        }
    }
}

/// Stable per-trial seed.
pub fn trial_seed(base_seed: u64, algorithm: &str, function: &str, trial_index: u64) -> u64 {
    stable_seed(base_seed, &[algorithm, function], trial_index)
}

/// Known optimizers by name.
#[derive(Clone)]
pub struct Registry {
    optimizers: Vec<Arc<dyn Optimizer>>,
}

impl Default for Registry {
    fn default() -> Self {
        Self {
            optimizers: Algorithm::ALL
                .iter()
                .map(|a| Arc::new(*a) as Arc<dyn Optimizer>)
                .collect(),
        }
    }
}

impl Registry {
    /// Adds an optimizer, replacing any existing one with the same name.
    pub fn register(&mut self, optimizer: Arc<dyn Optimizer>) {
        self.optimizers.retain(|o| o.name() != optimizer.name());
        self.optimizers.push(optimizer);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Optimizer>> {
        self.optimizers
            .iter()
            .find(|o| o.name() == name)
            .cloned()
            .ok_or_else(|| Error::config(format!("unknown algorithm `{name}`")))
    }

    pub fn names(&self) -> Vec<String> {
        self.optimizers.iter().map(|o| o.name().to_owned()).collect()
    }
}

fn run_trial_with(
    optimizer: &dyn Optimizer,
    problem: &Problem,
    config: &RunConfig,
    trial_index: u64,
) -> Result<TrialTrace> {
    let seed = trial_seed(config.base_seed, optimizer.name(), &problem.name, trial_index);
    let mut rng = RngStream::new(seed, 0);
    let mut trace = optimizer.run(config, problem.objective.as_ref(), &problem.space, &mut rng)?;
    trace.algorithm = optimizer.name().to_owned();
    trace.function = problem.name.clone();
    trace.trial_index = trial_index;
    trace.seed = seed;
    Ok(trace)
}

/// Runs one seeded trial of a built-in algorithm.
pub fn run_trial(algorithm: &str, problem: &Problem, config: &RunConfig, trial_index: u64) -> Result<TrialTrace> {
    let optimizer = Registry::default().get(algorithm)?;
    run_trial_with(optimizer.as_ref(), problem, config, trial_index)
}

/// `max(0, best - f_star)`, with anything below [`ERROR_FLOOR`] reported as 0.
pub fn compute_error(best_fitness: f64, f_star: f64) -> f64 {
    let e = best_fitness - f_star;
    if e < ERROR_FLOOR {
        0.0
    } else {
        e
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionRef {
    pub name: String,
    pub dimension: usize,
}

impl FunctionRef {
    pub fn new(name: impl Into<String>, dimension: usize) -> Self {
        Self {
            name: name.into(),
            dimension,
        }
    }
}

/// Outcome of all trials of one (algorithm, function) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub algorithm: String,
    pub function: String,
    pub dimension: usize,
    pub f_star: f64,
    /// Final error per trial, in trial order.
    pub errors: Vec<f64>,
    pub mean_error: Option<f64>,
    /// Sample standard deviation (0 for a single trial).
    pub std_error: Option<f64>,
    pub traces: Vec<TrialTrace>,
    /// Set when a trial failed; the cell then carries no errors or traces.
    pub diagnostic: Option<String>,
}

impl CellResult {
    fn from_traces(
        algorithm: &str,
        function: &FunctionRef,
        f_star: f64,
        outcomes: Vec<Result<TrialTrace>>,
    ) -> Self {
        let mut cell = CellResult {
            algorithm: algorithm.to_owned(),
            function: function.name.clone(),
            dimension: function.dimension,
            f_star,
            errors: Vec::new(),
            mean_error: None,
            std_error: None,
            traces: Vec::new(),
            diagnostic: None,
        };
        let mut traces = Vec::with_capacity(outcomes.len());
        for (i, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Ok(t) => traces.push(t),
                Err(e) => {
                    cell.diagnostic = Some(format!("trial {i}: {e}"));
                    return cell;
                }
            }
        }
        cell.errors = traces.iter().map(|t| compute_error(t.final_best(), f_star)).collect();
        let (mean, std) = mean_std(&cell.errors);
        cell.mean_error = Some(mean);
        cell.std_error = Some(std);
        cell.traces = traces;
        cell
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: RunConfig,
    pub algorithms: Vec<String>,
    pub functions: Vec<FunctionRef>,
    /// Function-major order: all algorithms for the first function, then the next.
    pub cells: Vec<CellResult>,
}

impl ExperimentResult {
    pub fn cell(&self, algorithm: &str, function: &str) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.algorithm == algorithm && c.function == function)
    }

    pub fn traces(&self) -> impl Iterator<Item = &TrialTrace> {
        self.cells.iter().flat_map(|c| c.traces.iter())
    }

    /// Mean errors as a functions x algorithms matrix (NaN for failed cells).
    pub fn mean_error_matrix(&self) -> Vec<Vec<f64>> {
        self.functions
            .iter()
            .map(|f| {
                self.algorithms
                    .iter()
                    .map(|a| {
                        self.cell(a, &f.name)
                            .and_then(|c| c.mean_error)
                            .unwrap_or(f64::NAN)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Runs a campaign against a registry of optimizers and a function catalog.
#[derive(Default)]
pub struct Experiment {
    pub registry: Registry,
    pub catalog: Catalog,
}

impl Experiment {
    /// Executes every (algorithm, function, trial) combination on a pool of
    /// `workers` threads. The result is identical for any worker count.
    pub fn run(
        &self,
        config: &RunConfig,
        algorithms: &[&str],
        functions: &[FunctionRef],
        workers: usize,
    ) -> Result<ExperimentResult> {
        config.validate()?;
        if workers == 0 {
            return Err(Error::config("workers must be at least 1"));
        }
        let optimizers = algorithms
            .iter()
            .map(|a| self.registry.get(a))
            .collect::<Result<Vec<_>>>()?;
        let problems = functions
            .iter()
            .map(|f| Problem::resolve(&self.catalog, &f.name, f.dimension, config.base_seed))
            .collect::<Result<Vec<_>>>()?;

        let mut tasks = Vec::new();
        for p in 0..problems.len() {
            for a in 0..optimizers.len() {
                for trial in 0..config.trials as u64 {
                    tasks.push((p, a, trial));
                }
            }
        }

        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
        let outcomes: Vec<Result<TrialTrace>> = pool.install(|| {
            tasks
                .par_iter()
                .map(|&(p, a, trial)| run_trial_with(optimizers[a].as_ref(), &problems[p], config, trial))
                .collect()
        });

        let mut outcomes = outcomes.into_iter();
        let mut cells = Vec::with_capacity(problems.len() * optimizers.len());
        for (problem, fref) in problems.iter().zip(functions) {
            for optimizer in &optimizers {
                let chunk: Vec<_> = outcomes.by_ref().take(config.trials).collect();
                cells.push(CellResult::from_traces(optimizer.name(), fref, problem.f_star, chunk));
            }
        }

        Ok(ExperimentResult {
            config: *config,
            algorithms: algorithms.iter().map(|s| s.to_string()).collect(),
            functions: functions.to_vec(),
            cells,
        })
    }
}

/// [`Experiment::run`] with the built-in algorithms and classical catalog.
pub fn run_experiment(
    config: &RunConfig,
    algorithms: &[&str],
    functions: &[FunctionRef],
    workers: usize,
) -> Result<ExperimentResult> {
    Experiment::default().run(config, algorithms, functions, workers)
}
