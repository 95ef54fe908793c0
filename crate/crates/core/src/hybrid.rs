//! GWO-DE: a stagnation-driven switch between GWO, DE/best/1/bin and jDE.
//!
//! The run starts in GWO mode. A counter `q` tracks consecutive
//! generations in which the best-so-far fitness did not improve. Once `q`
//! exceeds the threshold of the active mode the controller moves to the
//! next mode in the cycle GWO -> DE/best/1/bin -> jDE -> GWO and resets `q`.
//! All three kernels act on one shared population.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::de::{de_generation, DeControl, DeStrategy, JdeConfig};
use crate::error::{Error, Result};
use crate::gwo::gwo_generation;
use crate::harness::{RunConfig, TrialTrace};
use crate::objective::{Evaluator, Objective};
use crate::population::{uniform_init, Candidate, Population, SearchSpace};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HybridMode {
    Gwo,
    DeBest,
    Jde,
}

impl HybridMode {
    /// Numeric flag (1 = GWO, 2 = DE/best/1/bin, 3 = jDE).
    pub fn flag(self) -> u8 {
        match self {
            HybridMode::Gwo => 1,
            HybridMode::DeBest => 2,
            HybridMode::Jde => 3,
        }
    }

    /// Successor in the switching cycle.
    pub fn next(self) -> Self {
        match self {
            HybridMode::Gwo => HybridMode::DeBest,
            HybridMode::DeBest => HybridMode::Jde,
            HybridMode::Jde => HybridMode::Gwo,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            HybridMode::Gwo => "gwo",
            HybridMode::DeBest => "de_best",
            HybridMode::Jde => "jde",
        }
    }
}

impl fmt::Display for HybridMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HybridMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gwo" => Ok(HybridMode::Gwo),
            "de_best" => Ok(HybridMode::DeBest),
            "jde" => Ok(HybridMode::Jde),
            other => Err(Error::config(format!("unknown hybrid mode `{other}`"))),
        }
    }
}

/// Stagnation limits `Q1`, `Q2`, `Q3` for the GWO, DE/best and jDE phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchThresholds {
    pub q1: usize,
    pub q2: usize,
    pub q3: usize,
}

impl Default for SwitchThresholds {
    fn default() -> Self {
        Self {
            q1: 10,
            q2: 10,
            q3: 10,
        }
    }
}

impl SwitchThresholds {
    pub fn for_mode(&self, mode: HybridMode) -> usize {
        match mode {
            HybridMode::Gwo => self.q1,
            HybridMode::DeBest => self.q2,
            HybridMode::Jde => self.q3,
        }
    }
}

/// A mode that becomes active at `generation` (0-based index of the first
/// generation it executes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeSwitch {
    pub generation: usize,
    pub mode: HybridMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    pub mode: HybridMode,
    /// Consecutive generations without improvement in the active mode.
    pub q: usize,
    pub thresholds: SwitchThresholds,
    pub best_so_far: Candidate,
    pub mode_timeline: Vec<ModeSwitch>,
}

impl HybridState {
    pub fn new(thresholds: SwitchThresholds, initial_best: Candidate) -> Result<Self> {
        let f = initial_best.fitness()?;
        if !f.is_finite() {
            return Err(Error::Numeric(format!("initial best fitness is {f}")));
        }
        Ok(Self {
            mode: HybridMode::Gwo,
            q: 0,
            thresholds,
            best_so_far: initial_best,
            mode_timeline: vec![ModeSwitch {
                generation: 0,
                mode: HybridMode::Gwo,
            }],
        })
    }

    pub fn best_fitness(&self) -> f64 {
        // fitness is checked on every assignment
        self.best_so_far.fitness.unwrap_or(f64::INFINITY)
    }

    /// Compares this generation's best against the best so far. A
    /// non-improvement (`new >= prev`) increments `q`; an improvement resets
    /// it and replaces the best-so-far record. Returns whether it improved.
    pub fn record_outcome(&mut self, generation_best: &Candidate) -> Result<bool> {
        let prev = self.best_fitness();
        let new = generation_best.fitness()?;
        if !prev.is_finite() || !new.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite best fitness (previous {prev}, new {new})"
            )));
        }
        if new >= prev {
            self.q += 1;
            Ok(false)
        } else {
            self.q = 0;
            self.best_so_far = generation_best.clone();
            Ok(true)
        }
    }

    /// Moves to the next mode once `q` exceeds the active mode's threshold.
    /// `next_generation` is the index of the generation the new mode will
    /// run first. Returns whether a switch happened.
    pub fn maybe_switch(&mut self, next_generation: usize) -> bool {
        if self.q <= self.thresholds.for_mode(self.mode) {
            return false;
        }
        self.mode = self.mode.next();
        self.q = 0;
        self.mode_timeline.push(ModeSwitch {
            generation: next_generation,
            mode: self.mode,
        });
        true
    }
}

/// Executes one generation of a given mode. The standard implementation
/// dispatches to the GWO and DE kernels; tests substitute scripted ones.
pub trait ModeKernels {
    #[allow(clippy::too_many_arguments)]
    fn step(
        &mut self,
        mode: HybridMode,
        pop: &Population,
        t: usize,
        t_max: usize,
        rng: &mut RngStream,
        eval: &mut Evaluator<'_>,
        space: &SearchSpace,
    ) -> Result<Population>;
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StandardKernels {
    pub de_best: DeControl,
    pub jde: JdeConfig,
}

impl ModeKernels for StandardKernels {
    fn step(
        &mut self,
        mode: HybridMode,
        pop: &Population,
        t: usize,
        t_max: usize,
        rng: &mut RngStream,
        eval: &mut Evaluator<'_>,
        space: &SearchSpace,
    ) -> Result<Population> {
        match mode {
            HybridMode::Gwo => gwo_generation(pop, t, t_max, rng, eval, space),
            HybridMode::DeBest => {
                de_generation(pop, DeStrategy::Best1, &self.de_best, &self.jde, rng, eval, space)
            }
            HybridMode::Jde => {
                de_generation(pop, DeStrategy::Jde, &self.de_best, &self.jde, rng, eval, space)
            }
        }
    }
}

/// One hybrid generation: run the active kernel, update the stagnation
/// counter, then switch mode if the threshold is exceeded.
#[allow(clippy::too_many_arguments)]
pub fn hybrid_generation<K: ModeKernels + ?Sized>(
    state: &mut HybridState,
    pop: &Population,
    t: usize,
    t_max: usize,
    rng: &mut RngStream,
    eval: &mut Evaluator<'_>,
    space: &SearchSpace,
    kernels: &mut K,
) -> Result<Population> {
    let next = kernels.step(state.mode, pop, t, t_max, rng, eval, space)?;
    let generation_best = next.best()?;
    state.record_outcome(generation_best)?;
    state.maybe_switch(t + 1);
    Ok(next)
}

/// Full GWO-DE run: initialise and evaluate `np` wolves, then execute
/// `max_iterations` hybrid generations.
pub fn run_gwo_de(
    config: &RunConfig,
    objective: &dyn Objective,
    space: &SearchSpace,
    rng: &mut RngStream,
) -> Result<TrialTrace> {
    let mut kernels = StandardKernels {
        de_best: config.de,
        jde: config.jde,
    };
    run_gwo_de_with(config, objective, space, rng, &mut kernels)
}

pub fn run_gwo_de_with<K: ModeKernels + ?Sized>(
    config: &RunConfig,
    objective: &dyn Objective,
    space: &SearchSpace,
    rng: &mut RngStream,
    kernels: &mut K,
) -> Result<TrialTrace> {
    config.validate()?;
    Error::check_dim(space.dimension(), objective.dimension())?;
    let started = Instant::now();
    let mut init_rng = rng.fork(0);
    let mut evolve_rng = rng.fork(1);
    let mut eval = Evaluator::new(objective);

    let mut pop = uniform_init(space, config.np, &mut init_rng)?;
    eval.evaluate_population(&mut pop)?;
    let mut state = HybridState::new(config.thresholds, pop.best()?.clone())?;

    let t_max = config.max_iterations;
    let mut best = Vec::with_capacity(t_max + 1);
    best.push(state.best_fitness());
    for t in 0..t_max {
        pop = hybrid_generation(&mut state, &pop, t, t_max, &mut evolve_rng, &mut eval, space, kernels)?;
        best.push(state.best_fitness());
    }

    Ok(TrialTrace {
        seed: rng.seed(),
        best_per_generation: best,
        evaluations_used: eval.count(),
        mode_timeline: Some(state.mode_timeline),
        best_position: state.best_so_far.position,
        wall_time: started.elapsed().as_secs_f64(),
        ..TrialTrace::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::FnObjective;

    fn state_at(best: f64, q: usize) -> HybridState {
        let mut s = HybridState::new(SwitchThresholds::default(), Candidate::with_fitness(vec![0.0], best)).unwrap();
        s.q = q;
        s
    }

    #[test]
    fn outcome_counting() {
        let mut s = state_at(1.0, 3);
        assert!(!s.record_outcome(&Candidate::with_fitness(vec![1.0], 1.0)).unwrap());
        assert_eq!(s.q, 4);

        let mut s = state_at(1.0, 7);
        assert!(s.record_outcome(&Candidate::with_fitness(vec![2.0], 0.5)).unwrap());
        assert_eq!(s.q, 0);
        assert_eq!(s.best_so_far.position, vec![2.0]);

        let mut s = state_at(1.0, 0);
        s.record_outcome(&Candidate::with_fitness(vec![3.0], 2.0)).unwrap();
        assert_eq!(s.q, 1);
        assert_eq!(s.best_fitness(), 1.0);
    }

    #[test]
    fn outcome_rejects_non_finite() {
        let mut s = state_at(1.0, 0);
        assert!(matches!(
            s.record_outcome(&Candidate::with_fitness(vec![0.0], f64::NAN)),
            Err(Error::Numeric(_))
        ));
        assert!(matches!(
            s.record_outcome(&Candidate::with_fitness(vec![0.0], f64::INFINITY)),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn switch_thresholds_strict() {
        let mut s = state_at(1.0, 10);
        assert!(!s.maybe_switch(5));
        assert_eq!(s.mode, HybridMode::Gwo);

        s.q = 11;
        assert!(s.maybe_switch(5));
        assert_eq!((s.mode, s.q), (HybridMode::DeBest, 0));

        s.mode = HybridMode::Jde;
        s.q = 11;
        assert!(s.maybe_switch(9));
        assert_eq!((s.mode, s.q), (HybridMode::Gwo, 0));
        assert_eq!(
            s.mode_timeline.last(),
            Some(&ModeSwitch { generation: 9, mode: HybridMode::Gwo })
        );
    }

    #[test]
    fn flags_and_cycle() {
        assert_eq!(HybridMode::Gwo.flag(), 1);
        assert_eq!(HybridMode::DeBest.flag(), 2);
        assert_eq!(HybridMode::Jde.flag(), 3);
        assert_eq!(HybridMode::Gwo.next().next().next(), HybridMode::Gwo);
    }

    #[test]
    fn flat_objective_cycles_every_generation() {
        let obj = FnObjective::new(2, |_: &[f64]| 1.0);
        let config = RunConfig {
            np: 6,
            max_iterations: 5,
            dimension: 2,
            thresholds: SwitchThresholds { q1: 0, q2: 0, q3: 0 },
            ..RunConfig::default()
        };
        let space = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
        let trace = run_gwo_de(&config, &obj, &space, &mut RngStream::new(3, 0)).unwrap();
        let modes: Vec<(usize, HybridMode)> = trace
            .mode_timeline
            .unwrap()
            .iter()
            .map(|s| (s.generation, s.mode))
            .collect();
        use HybridMode::*;
        assert_eq!(
            modes,
            vec![(0, Gwo), (1, DeBest), (2, Jde), (3, Gwo), (4, DeBest), (5, Jde)]
        );
        assert_eq!(trace.evaluations_used, 6 * 6);
    }

    #[test]
    fn gwo_mode_matches_plain_gwo_generation() {
        let obj = FnObjective::new(3, |x: &[f64]| x.iter().map(|v| v * v).sum());
        let space = SearchSpace::uniform(3, -2.0, 2.0).unwrap();
        let mut pop = uniform_init(&space, 8, &mut RngStream::new(1, 0)).unwrap();
        Evaluator::new(&obj).evaluate_population(&mut pop).unwrap();
        let mut state = HybridState::new(SwitchThresholds::default(), pop.best().unwrap().clone()).unwrap();

        let mut e1 = Evaluator::new(&obj);
        let via_hybrid = hybrid_generation(
            &mut state, &pop, 3, 10, &mut RngStream::new(4, 0), &mut e1, &space, &mut StandardKernels::default(),
        )
        .unwrap();
        let mut e2 = Evaluator::new(&obj);
        let direct = gwo_generation(&pop, 3, 10, &mut RngStream::new(4, 0), &mut e2, &space).unwrap();
        assert_eq!(via_hybrid, direct);
        assert_eq!(e1.count(), 8);
    }

    #[test]
    fn trace_shape_and_monotone() {
        let obj = FnObjective::new(2, |x: &[f64]| x.iter().map(|v| v * v).sum());
        let space = SearchSpace::uniform(2, -100.0, 100.0).unwrap();
        let config = RunConfig { np: 20, max_iterations: 50, dimension: 2, ..RunConfig::default() };
        let trace = run_gwo_de(&config, &obj, &space, &mut RngStream::new(10, 0)).unwrap();
        assert_eq!(trace.best_per_generation.len(), 51);
        assert_eq!(trace.evaluations_used, 20 * 51);
        assert!(trace.best_per_generation.windows(2).all(|w| w[1] <= w[0]));
        assert!(trace.best_per_generation[50] <= trace.best_per_generation[0]);

        let empty = RunConfig { max_iterations: 0, ..config };
        let trace = run_gwo_de(&empty, &obj, &space, &mut RngStream::new(10, 0)).unwrap();
        assert_eq!(trace.best_per_generation.len(), 1);
        assert_eq!(trace.evaluations_used, 20);
    }
}
