//! Objective functions and evaluation accounting.

use crate::error::{Error, Result};
use crate::population::{Candidate, Population};

/// A minimization target.
pub trait Objective: Send + Sync {
    fn dimension(&self) -> usize;

    fn evaluate(&self, x: &[f64]) -> Result<f64>;
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        (**self).evaluate(x)
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        (**self).evaluate(x)
    }
}

/// Wraps an objective and counts every call made through it.
///
/// This is the single accounting point for the evaluation budget: kernels
/// never call an [`Objective`] directly.
pub struct Evaluator<'a> {
    objective: &'a dyn Objective,
    count: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(objective: &'a dyn Objective) -> Self {
        Self { objective, count: 0 }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn dimension(&self) -> usize {
        self.objective.dimension()
    }

    pub fn value(&mut self, x: &[f64]) -> Result<f64> {
        Error::check_dim(self.objective.dimension(), x.len())?;
        self.count += 1;
        let v = self.objective.evaluate(x)?;
        if v.is_nan() {
            return Err(Error::Numeric("objective returned NaN".into()));
        }
        Ok(v)
    }

    pub fn evaluate(&mut self, candidate: &mut Candidate) -> Result<f64> {
        let v = self.value(&candidate.position)?;
        candidate.fitness = Some(v);
        Ok(v)
    }

    pub fn evaluate_population(&mut self, pop: &mut Population) -> Result<()> {
        for c in &mut pop.members {
            self.evaluate(c)?;
        }
        Ok(())
    }
}

/// Objective defined by a plain function of the position.
pub struct FnObjective<F> {
    dimension: usize,
    f: F,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(dimension: usize, f: F) -> Self {
        Self { dimension, f }
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok((self.f)(x))
    }
}
