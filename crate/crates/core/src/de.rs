//! Differential evolution kernel: DE/rand/1/bin, DE/best/1/bin and jDE.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Evaluator;
use crate::population::{Candidate, Population, SearchSpace, MIN_POPULATION};
use crate::rng::RngStream;

/// Starting F and CR for jDE members that do not carry their own yet.
pub const JDE_INITIAL_F: f64 = 0.5;
pub const JDE_INITIAL_CR: f64 = 0.9;

/// Mutation scale factor and crossover constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeControl {
    pub f: f64,
    pub cr: f64,
}

impl DeControl {
    pub fn new(f: f64, cr: f64) -> Result<Self> {
        if !(f > 0.0 && f.is_finite()) {
            return Err(Error::config(format!("DE scale factor must be positive, got {f}")));
        }
        if !(0.0..=1.0).contains(&cr) {
            return Err(Error::config(format!("crossover constant must lie in [0, 1], got {cr}")));
        }
        Ok(Self { f, cr })
    }
}

impl Default for DeControl {
    fn default() -> Self {
        Self { f: 0.5, cr: 0.9 }
    }
}

/// jDE self-adaptation settings. Adapted F lies in `[f_lower, f_lower + f_upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JdeConfig {
    pub f_lower: f64,
    pub f_upper: f64,
    pub prob1: f64,
    pub prob2: f64,
}

impl Default for JdeConfig {
    fn default() -> Self {
        Self {
            f_lower: 0.1,
            f_upper: 0.9,
            prob1: 0.1,
            prob2: 0.1,
        }
    }
}

impl JdeConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = 0.0..=1.0;
        if !(self.f_lower > 0.0 && self.f_upper > 0.0) {
            return Err(Error::config("jDE F limits must be positive"));
        }
        if !unit.contains(&self.prob1) || !unit.contains(&self.prob2) {
            return Err(Error::config("jDE adaptation probabilities must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeStrategy {
    Rand1,
    Best1,
    /// Self-adaptive F and CR with the rand/1 mutation.
    Jde,
}

fn check_population(pop: &Population) -> Result<()> {
    if pop.len() < MIN_POPULATION {
        return Err(Error::config(format!(
            "DE mutation needs at least {MIN_POPULATION} members, got {}",
            pop.len()
        )));
    }
    Ok(())
}

/// Draws `K` mutually distinct indices from `0..np`, none of them in `exclude`.
fn distinct_indices<const K: usize>(np: usize, exclude: &[usize], rng: &mut RngStream) -> [usize; K] {
    let mut picked = [usize::MAX; K];
    for slot in 0..K {
        picked[slot] = loop {
            let r = rng.index(np);
            if !exclude.contains(&r) && !picked[..slot].contains(&r) {
                break r;
            }
        };
    }
    picked
}

/// `base + f * (a - b)`.
pub fn difference_mutant(base: &[f64], a: &[f64], b: &[f64], f: f64) -> Vec<f64> {
    base.iter()
        .zip(a.iter().zip(b))
        .map(|(x, (p, q))| x + f * (p - q))
        .collect()
}

/// Indices `[r1, r2, r3]` for DE/rand/1, all distinct and different from `m`.
pub fn rand_1_indices(np: usize, m: usize, rng: &mut RngStream) -> [usize; 3] {
    distinct_indices::<3>(np, &[m], rng)
}

/// Indices `[r1, r2]` for DE/best/1, distinct and different from `m` and `best`.
pub fn best_1_indices(np: usize, best: usize, m: usize, rng: &mut RngStream) -> [usize; 2] {
    distinct_indices::<2>(np, &[m, best], rng)
}

/// DE/rand/1 mutant `X[r1] + f * (X[r2] - X[r3])`, without boundary repair.
pub fn mutate_rand_1(pop: &Population, m: usize, f: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    check_population(pop)?;
    let [r1, r2, r3] = rand_1_indices(pop.len(), m, rng);
    let x = |i: usize| pop.members[i].position.as_slice();
    Ok(difference_mutant(x(r1), x(r2), x(r3), f))
}

/// DE/best/1 mutant `X[best] + f * (X[r1] - X[r2])`, without boundary repair.
pub fn mutate_best_1(
    pop: &Population,
    best: usize,
    m: usize,
    f: f64,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    check_population(pop)?;
    let [r1, r2] = best_1_indices(pop.len(), best, m, rng);
    let x = |i: usize| pop.members[i].position.as_slice();
    Ok(difference_mutant(x(best), x(r1), x(r2), f))
}

/// Binomial crossover with explicit draws: coordinate `k` comes from the
/// mutant iff `draws[k] < cr` or `k == forced`.
pub fn binomial_crossover_with(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    forced: usize,
    draws: &[f64],
) -> Result<Vec<f64>> {
    Error::check_dim(target.len(), mutant.len())?;
    Error::check_dim(target.len(), draws.len())?;
    if forced >= target.len() {
        return Err(Error::Dimension {
            expected: target.len(),
            actual: forced + 1,
        });
    }
    Ok(target
        .iter()
        .zip(mutant)
        .zip(draws)
        .enumerate()
        .map(|(k, ((&t, &v), &r))| if r < cr || k == forced { v } else { t })
        .collect())
}

/// Binomial crossover. At least one coordinate always comes from the mutant.
pub fn binomial_crossover(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    Error::check_dim(target.len(), mutant.len())?;
    if target.is_empty() {
        return Err(Error::Dimension { expected: 1, actual: 0 });
    }
    let forced = rng.index(target.len());
    let draws: Vec<f64> = (0..target.len()).map(|_| rng.uniform()).collect();
    binomial_crossover_with(target, mutant, cr, forced, &draws)
}

/// Keeps the trial only if it is strictly better; ties keep the target.
pub fn greedy_select(target: Candidate, trial: Candidate) -> Result<Candidate> {
    if trial.fitness()? < target.fitness()? {
        Ok(trial)
    } else {
        Ok(target)
    }
}

/// jDE update from explicit draws `[rnd1, rnd2, rnd3, rnd4]`.
pub fn jde_adapt_with(control: DeControl, config: &JdeConfig, rnd: [f64; 4]) -> DeControl {
    let f = if rnd[1] < config.prob1 {
        config.f_lower + rnd[0] * config.f_upper
    } else {
        control.f
    };
    let cr = if rnd[3] < config.prob2 { rnd[2] } else { control.cr };
    DeControl { f, cr }
}

/// Self-adapts one member's F and CR. Always consumes four draws.
pub fn jde_adapt(control: DeControl, config: &JdeConfig, rng: &mut RngStream) -> DeControl {
    let rnd = [
        rng.uniform_closed(),
        rng.uniform_closed(),
        rng.uniform_closed(),
        rng.uniform_closed(),
    ];
    jde_adapt_with(control, config, rnd)
}

fn member_control(c: &Candidate) -> DeControl {
    DeControl {
        f: c.f_param.unwrap_or(JDE_INITIAL_F),
        cr: c.cr_param.unwrap_or(JDE_INITIAL_CR),
    }
}

/// One DE generation: mutation, crossover, clamping, evaluation and greedy
/// selection for every member against the generation-start snapshot.
///
/// `control` drives the fixed-parameter strategies; jDE reads and writes
/// per-member parameters instead (members without any start at
/// [`JDE_INITIAL_F`], [`JDE_INITIAL_CR`]).
pub fn de_generation(
    pop: &Population,
    strategy: DeStrategy,
    control: &DeControl,
    jde: &JdeConfig,
    rng: &mut RngStream,
    eval: &mut Evaluator<'_>,
    space: &SearchSpace,
) -> Result<Population> {
    check_population(pop)?;
    Error::check_dim(space.dimension(), pop.dimension())?;
    if !pop.is_evaluated() {
        return Err(Error::State("DE generation needs an evaluated population".into()));
    }
    let best = pop.best_index()?;
    let generation_seed = rng.next_u64();

    let mut next = Vec::with_capacity(pop.len());
    for (m, target) in pop.members.iter().enumerate() {
        let mut member_rng = RngStream::new(generation_seed, m as u64);
        let r = &mut member_rng;

        let (ctl, mutant) = match strategy {
            DeStrategy::Rand1 => (*control, mutate_rand_1(pop, m, control.f, r)?),
            DeStrategy::Best1 => (*control, mutate_best_1(pop, best, m, control.f, r)?),
            DeStrategy::Jde => {
                let adapted = jde_adapt(member_control(target), jde, r);
                (adapted, mutate_rand_1(pop, m, adapted.f, r)?)
            }
        };

        let mut position = binomial_crossover(&target.position, &mutant, ctl.cr, r)?;
        space.clamp_in_place(&mut position);
        let mut trial = target.moved_to(position);
        let mut target = target.clone();
        if strategy == DeStrategy::Jde {
            trial.f_param = Some(ctl.f);
            trial.cr_param = Some(ctl.cr);
            let old = member_control(&target);
            target.f_param = Some(old.f);
            target.cr_param = Some(old.cr);
        }
        eval.evaluate(&mut trial)?;
        next.push(greedy_select(target, trial)?);
    }

    Ok(Population {
        members: next,
        generation: pop.generation + 1,
    })
}
