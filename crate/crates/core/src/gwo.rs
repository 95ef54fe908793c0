//! Grey Wolf Optimizer kernel.
//!
//! Each wolf `W` moves towards the three best members of the pack (alpha,
//! beta and delta). For every leader `L` the move samples
//!
//! ```text
//! c1 = 2u*v1 - u        v1 ~ U[0,1]
//! c2 = 2*v2             v2 ~ U[0,1]
//! V  = |c2 * L - W|
//! L' = L - c1 * V
//! ```
//!
//! coordinate-wise, and the new position is the mean of the three `L'`.
//! The scalar `u` decays linearly from 2 to 0 over the run, shifting the
//! pack from exploration (|c1| up to 2) to exploitation (c1 -> 0).

use crate::error::{Error, Result};
use crate::objective::Evaluator;
use crate::population::{Candidate, Population, SearchSpace};
use crate::rng::RngStream;

/// Linear schedule `2 * (1 - t / t_max)`.
pub fn coefficient_u(t: usize, t_max: usize) -> Result<f64> {
    if t_max == 0 {
        return Err(Error::config("t_max must be at least 1"));
    }
    if t > t_max {
        return Err(Error::Numeric(format!(
            "generation {t} is past the schedule end {t_max}"
        )));
    }
    Ok(2.0 * (1.0 - t as f64 / t_max as f64))
}

/// The best, second-best and third-best members of a population.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderTriple {
    pub alpha: Candidate,
    pub beta: Candidate,
    pub delta: Candidate,
    /// Population indices of alpha, beta, delta.
    pub indices: [usize; 3],
}

impl LeaderTriple {
    fn positions(&self) -> [&[f64]; 3] {
        [&self.alpha.position, &self.beta.position, &self.delta.position]
    }
}

/// Picks the three lowest-fitness members, ties broken by lowest index.
pub fn select_leaders(pop: &Population) -> Result<LeaderTriple> {
    if pop.len() < 3 {
        return Err(Error::config(format!(
            "leader selection needs at least 3 members, got {}",
            pop.len()
        )));
    }
    let mut order = Vec::with_capacity(pop.len());
    for (i, c) in pop.members.iter().enumerate() {
        order.push((c.fitness()?, i));
    }
    // stable sort keeps equal fitnesses in index order
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let idx = [order[0].1, order[1].1, order[2].1];
    Ok(LeaderTriple {
        alpha: pop.members[idx[0]].clone(),
        beta: pop.members[idx[1]].clone(),
        delta: pop.members[idx[2]].clone(),
        indices: idx,
    })
}

/// Per-leader coefficient vectors for one wolf move.
#[derive(Debug, Clone, PartialEq)]
pub struct GwoCoefficients {
    pub u: f64,
    pub c1: [Vec<f64>; 3],
    pub c2: [Vec<f64>; 3],
}

impl GwoCoefficients {
    /// Builds coefficients from explicit unit draws `v1`, `v2` (one vector
    /// per leader).
    pub fn from_draws(u: f64, v1: [Vec<f64>; 3], v2: [Vec<f64>; 3]) -> Self {
        let c1 = v1.map(|v| v.into_iter().map(|r| 2.0 * u * r - u).collect());
        let c2 = v2.map(|v| v.into_iter().map(|r| 2.0 * r).collect());
        Self { u, c1, c2 }
    }

    pub fn dimension(&self) -> usize {
        self.c1[0].len()
    }
}

/// Samples fresh `v1`, `v2` per leader and coordinate.
pub fn sample_coefficients(u: f64, d: usize, rng: &mut RngStream) -> GwoCoefficients {
    let mut c1: [Vec<f64>; 3] = Default::default();
    let mut c2: [Vec<f64>; 3] = Default::default();
    for (a, c) in c1.iter_mut().zip(c2.iter_mut()) {
        a.reserve_exact(d);
        c.reserve_exact(d);
        for _ in 0..d {
            let v1 = rng.uniform_closed();
            let v2 = rng.uniform_closed();
            a.push(2.0 * u * v1 - u);
            c.push(2.0 * v2);
        }
    }
    GwoCoefficients { u, c1, c2 }
}

/// Position update for one wolf, before boundary repair.
pub fn gwo_move(wolf: &[f64], leaders: &LeaderTriple, coeffs: &GwoCoefficients) -> Result<Vec<f64>> {
    let d = wolf.len();
    for p in leaders.positions() {
        Error::check_dim(d, p.len())?;
    }
    for l in 0..3 {
        Error::check_dim(d, coeffs.c1[l].len())?;
        Error::check_dim(d, coeffs.c2[l].len())?;
    }

    let mut out = vec![0.0; d];
    for (l, leader) in leaders.positions().into_iter().enumerate() {
        let (c1, c2) = (&coeffs.c1[l], &coeffs.c2[l]);
        for k in 0..d {
            let dist = (c2[k] * leader[k] - wolf[k]).abs();
            out[k] += leader[k] - c1[k] * dist;
        }
    }
    for v in &mut out {
        *v /= 3.0;
    }
    Ok(out)
}

/// One full GWO generation.
///
/// Leaders are taken from `pop` as given; every member is moved, clamped
/// and re-evaluated (exactly `NP` evaluations). There is no greedy
/// selection, so individual members may get worse.
pub fn gwo_generation(
    pop: &Population,
    t: usize,
    t_max: usize,
    rng: &mut RngStream,
    eval: &mut Evaluator<'_>,
    space: &SearchSpace,
) -> Result<Population> {
    let leaders = select_leaders(pop)?;
    let u = coefficient_u(t, t_max)?;
    let d = space.dimension();
    Error::check_dim(d, pop.dimension())?;

    // one sub-stream per member keeps results independent of evaluation order
    let generation_seed = rng.next_u64();
    let mut members = pop
        .members
        .iter()
        .enumerate()
        .map(|(m, wolf)| {
            let mut member_rng = RngStream::new(generation_seed, m as u64);
            let coeffs = sample_coefficients(u, d, &mut member_rng);
            let mut position = gwo_move(&wolf.position, &leaders, &coeffs)?;
            space.clamp_in_place(&mut position);
            Ok(wolf.moved_to(position))
        })
        .collect::<Result<Vec<_>>>()?;

    for c in &mut members {
        eval.evaluate(c)?;
    }
    Ok(Population {
        members,
        generation: t + 1,
    })
}
