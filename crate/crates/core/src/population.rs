//! Search boxes, candidates and populations shared by every optimizer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Minimum population size. DE/rand/1 needs the target plus three distinct
/// donors.
pub const MIN_POPULATION: usize = 4;

/// Axis-aligned box `[lower[i], upper[i]]` in `D` dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::config("search space needs at least one dimension"));
        }
        Error::check_dim(lower.len(), upper.len())?;
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            // also rejects NaN bounds
            if lo.partial_cmp(hi) != Some(std::cmp::Ordering::Less) {
                return Err(Error::config(format!(
                    "bounds for coordinate {i} are not ordered: [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval on every coordinate.
    pub fn uniform(dimension: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dimension], vec![upper; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    /// Projects `x` onto the box in place.
    #[inline]
    pub fn clamp_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dimension());
        for ((v, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = hi.min(lo.max(*v));
        }
    }
}

/// Projects `position` onto the box: `min(upper, max(lower, x))` per coordinate.
pub fn clamp_to_bounds(position: &[f64], space: &SearchSpace) -> Result<Vec<f64>> {
    Error::check_dim(space.dimension(), position.len())?;
    let mut out = position.to_vec();
    space.clamp_in_place(&mut out);
    Ok(out)
}

/// A point in the search space with its cached objective value and, for
/// self-adaptive DE, its own control parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub position: Vec<f64>,
    pub fitness: Option<f64>,
    pub f_param: Option<f64>,
    pub cr_param: Option<f64>,
}

impl Candidate {
    pub fn new(position: Vec<f64>) -> Self {
        Self {
            position,
            fitness: None,
            f_param: None,
            cr_param: None,
        }
    }

    pub fn with_fitness(position: Vec<f64>, fitness: f64) -> Self {
        Self {
            fitness: Some(fitness),
            ..Self::new(position)
        }
    }

    pub fn dimension(&self) -> usize {
        self.position.len()
    }

    pub fn fitness(&self) -> Result<f64> {
        self.fitness
            .ok_or_else(|| Error::State("candidate fitness has not been evaluated".into()))
    }

    /// A new unevaluated candidate at `position` that inherits this
    /// candidate's control parameters.
    pub(crate) fn moved_to(&self, position: Vec<f64>) -> Self {
        Self {
            position,
            fitness: None,
            f_param: self.f_param,
            cr_param: self.cr_param,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub members: Vec<Candidate>,
    pub generation: usize,
}

impl Population {
    pub fn new(members: Vec<Candidate>) -> Self {
        Self {
            members,
            generation: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.members.first().map_or(0, Candidate::dimension)
    }

    pub fn is_evaluated(&self) -> bool {
        self.members.iter().all(|c| c.fitness.is_some())
    }

    /// Index of the lowest-fitness member; ties go to the lowest index.
    pub fn best_index(&self) -> Result<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in self.members.iter().enumerate() {
            let f = c.fitness()?;
            match best {
                Some((_, bf)) if f >= bf => {}
                _ => best = Some((i, f)),
            }
        }
        best.map(|(i, _)| i)
            .ok_or_else(|| Error::State("population is empty".into()))
    }

    pub fn best(&self) -> Result<&Candidate> {
        Ok(&self.members[self.best_index()?])
    }

    pub fn best_fitness(&self) -> Result<f64> {
        self.best()?.fitness()
    }
}

/// Draws `np` candidates uniformly inside `space`. Fitness is left unevaluated.
pub fn uniform_init(space: &SearchSpace, np: usize, rng: &mut RngStream) -> Result<Population> {
    if np < MIN_POPULATION {
        return Err(Error::config(format!(
            "population size {np} is below the minimum of {MIN_POPULATION}"
        )));
    }
    let members = (0..np)
        .map(|_| {
            let position = space
                .lower()
                .iter()
                .zip(space.upper())
                .map(|(lo, hi)| {
                    // lo + u*(hi-lo) can round up to hi for u close to 1
                    let v = lo + rng.uniform() * (hi - lo);
                    v.min(*hi)
                })
                .collect();
            Candidate::new(position)
        })
        .collect();
    Ok(Population::new(members))
}
