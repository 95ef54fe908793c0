#![allow(dead_code)]

use gwo_de::hybrid::{run_gwo_de_with, HybridMode, ModeKernels};
use gwo_de::{
    Candidate, Evaluator, FnObjective, Objective, Population, Result, RngStream, RunConfig, SearchSpace,
    SwitchThresholds,
};

/// Kernels that ignore the optimizer and make the population best improve
/// (or not) according to a fixed pattern. Records the mode of every call.
pub struct ScriptedKernels {
    pub pattern: Vec<bool>,
    pub calls: Vec<HybridMode>,
}

impl ScriptedKernels {
    pub fn new(pattern: Vec<bool>) -> Self {
        Self {
            pattern,
            calls: Vec::new(),
        }
    }
}

impl ModeKernels for ScriptedKernels {
    fn step(
        &mut self,
        mode: HybridMode,
        pop: &Population,
        t: usize,
        _t_max: usize,
        _rng: &mut RngStream,
        _eval: &mut Evaluator<'_>,
        _space: &SearchSpace,
    ) -> Result<Population> {
        self.calls.push(mode);
        let mut next = pop.clone();
        next.generation += 1;
        if self.pattern[t] {
            let best = pop.best_fitness()?;
            next.members[0] = Candidate::with_fitness(pop.members[0].position.clone(), best - 1.0);
        }
        Ok(next)
    }
}

/// Runs the hybrid driver with scripted kernels and returns the timeline as
/// (generation, flag) pairs together with the modes actually dispatched.
pub fn scripted_timeline(pattern: &[bool], thresholds: [usize; 3]) -> (Vec<(usize, u8)>, Vec<HybridMode>) {
    let objective = FnObjective::new(2, |_: &[f64]| 1000.0);
    let space = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
    let config = RunConfig {
        np: 4,
        max_iterations: pattern.len(),
        trials: 1,
        dimension: 2,
        thresholds: SwitchThresholds {
            q1: thresholds[0],
            q2: thresholds[1],
            q3: thresholds[2],
        },
        ..RunConfig::default()
    };
    let mut kernels = ScriptedKernels::new(pattern.to_vec());
    let mut rng = RngStream::new(9, 0);
    let trace = run_gwo_de_with(&config, &objective as &dyn Objective, &space, &mut rng, &mut kernels).unwrap();
    let timeline = trace
        .mode_timeline
        .unwrap()
        .iter()
        .map(|s| (s.generation, s.mode.flag()))
        .collect();
    (timeline, kernels.calls)
}

/// True when consecutive timeline entries follow GWO -> DE/best -> jDE -> GWO.
pub fn is_cyclic(timeline: &[(usize, u8)]) -> bool {
    timeline.first().map(|e| e.1) == Some(1)
        && timeline.windows(2).all(|w| w[1].1 == w[0].1 % 3 + 1 && w[1].0 > w[0].0)
}

/// Counts objective calls independently of the library's own counter.
pub struct Counting<O> {
    pub inner: O,
    pub calls: std::sync::atomic::AtomicU64,
}

impl<O: Objective> Counting<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            calls: std::sync::atomic::AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(std::sync::atomic::Ordering::SeqCst)
    }
}

impl<O: Objective> Objective for Counting<O> {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.calls.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
        self.inner.evaluate(x)
    }
}
