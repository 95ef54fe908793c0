//! Classical test functions and the shift/rotation wrapper.
//!
//! The catalog is plain data: each [`FunctionDef`] names a function, its
//! default box, the smallest dimension it is defined for and where its
//! global minimum sits. [`Catalog::register`] accepts further definitions.

use std::f64::consts::{E, PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::population::SearchSpace;
use crate::rng::RngStream;

/// Box used for shifted/rotated problems regardless of the base function.
pub const TRANSFORMED_BOUND: f64 = 100.0;
/// Shift vectors are drawn uniformly from `[-SHIFT_BOUND, SHIFT_BOUND]^D`.
pub const SHIFT_BOUND: f64 = 80.0;

/// Location of a function's global minimiser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimum {
    /// Every coordinate equals the given value.
    Constant(f64),
    Unknown,
}

impl Optimum {
    pub fn point(&self, dimension: usize) -> Option<Vec<f64>> {
        match *self {
            Optimum::Constant(v) => Some(vec![v; dimension]),
            Optimum::Unknown => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FunctionDef {
    pub name: &'static str,
    pub lower: f64,
    pub upper: f64,
    pub min_dimension: usize,
    pub f_star: f64,
    pub optimum: Optimum,
    pub eval: fn(&[f64]) -> f64,
}

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

pub fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
    let cs = x.iter().map(|v| (TAU * v).cos()).sum::<f64>() / n;
    // grouped so that the origin evaluates to exactly zero
    (20.0 - 20.0 * (-0.2 * sq.sqrt()).exp()) + (E - cs.exp())
}

pub fn griewank(x: &[f64]) -> f64 {
    let sum = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
    let prod: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product();
    sum - prod + 1.0
}

const WEIERSTRASS_A: f64 = 0.5;
const WEIERSTRASS_B: f64 = 3.0;
const WEIERSTRASS_K_MAX: usize = 20;

fn weierstrass_term(z: f64) -> f64 {
    let (mut ak, mut bk, mut s) = (1.0, 1.0, 0.0);
    for _ in 0..=WEIERSTRASS_K_MAX {
        s += ak * (TAU * bk * z).cos();
        ak *= WEIERSTRASS_A;
        bk *= WEIERSTRASS_B;
    }
    s
}

pub fn weierstrass(x: &[f64]) -> f64 {
    // same expression as the per-coordinate term at z = 0.5, so the
    // difference vanishes exactly at the origin
    let offset = weierstrass_term(0.5);
    x.iter().map(|v| weierstrass_term(v + 0.5) - offset).sum()
}

pub fn rastrigin(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v - 10.0 * (TAU * v).cos() + 10.0).sum()
}

pub fn noncontinuous_rastrigin(x: &[f64]) -> f64 {
    x.iter()
        .map(|&v| {
            let y = if v.abs() < 0.5 { v } else { (2.0 * v).round() / 2.0 };
            y * y - 10.0 * (TAU * y).cos() + 10.0
        })
        .sum()
}

/// Boundary penalty `u(x, a, k, m)`.
pub fn penalty(x: f64, a: f64, k: f64, m: i32) -> f64 {
    if x > a {
        k * (x - a).powi(m)
    } else if x < -a {
        k * (-x - a).powi(m)
    } else {
        0.0
    }
}

/// `sin^2(pi * t)`, reduced first so that integer `t` gives exactly zero.
fn sin_pi_sq(t: f64) -> f64 {
    (PI * (t - t.round())).sin().powi(2)
}

pub fn penalized_f12(x: &[f64]) -> f64 {
    let n = x.len();
    let y: Vec<f64> = x.iter().map(|v| 1.0 + (v + 1.0) / 4.0).collect();
    let mut s = 10.0 * sin_pi_sq(y[0]);
    for i in 0..n - 1 {
        s += (y[i] - 1.0).powi(2) * (1.0 + 10.0 * sin_pi_sq(y[i + 1]));
    }
    s += (y[n - 1] - 1.0).powi(2);
    PI / n as f64 * s + x.iter().map(|&v| penalty(v, 10.0, 100.0, 4)).sum::<f64>()
}

pub fn penalized_f13(x: &[f64]) -> f64 {
    let n = x.len();
    let mut s = sin_pi_sq(3.0 * x[0]);
    for i in 0..n - 1 {
        s += (x[i] - 1.0).powi(2) * (1.0 + sin_pi_sq(3.0 * x[i + 1]));
    }
    s += (x[n - 1] - 1.0).powi(2) * (1.0 + sin_pi_sq(2.0 * x[n - 1]));
    0.1 * s + x.iter().map(|&v| penalty(v, 5.0, 100.0, 4)).sum::<f64>()
}

/// Schaffer F6 generalised through the Euclidean norm; identical to the
/// classical two-variable form when `D = 2`.
pub fn schaffer_f6(x: &[f64]) -> f64 {
    let s: f64 = x.iter().map(|v| v * v).sum();
    0.5 + (s.sqrt().sin().powi(2) - 0.5) / (1.0 + 0.001 * s).powi(2)
}

const fn def(
    name: &'static str,
    bound: f64,
    min_dimension: usize,
    at: f64,
    eval: fn(&[f64]) -> f64,
) -> FunctionDef {
    FunctionDef {
        name,
        lower: -bound,
        upper: bound,
        min_dimension,
        f_star: 0.0,
        optimum: Optimum::Constant(at),
        eval,
    }
}

/// The ten classical functions, in table order.
pub const CLASSICAL: [FunctionDef; 10] = [
    def("schaffer_f6", 100.0, 1, 0.0, schaffer_f6),
    def("sphere", 100.0, 1, 0.0, sphere),
    def("rosenbrock", 30.0, 2, 1.0, rosenbrock),
    def("ackley", 32.0, 1, 0.0, ackley),
    def("griewank", 600.0, 1, 0.0, griewank),
    def("weierstrass", 0.5, 1, 0.0, weierstrass),
    def("rastrigin", 5.12, 1, 0.0, rastrigin),
    def("noncontinuous_rastrigin", 5.12, 1, 0.0, noncontinuous_rastrigin),
    def("penalized_f12", 50.0, 1, -1.0, penalized_f12),
    def("penalized_f13", 50.0, 1, 1.0, penalized_f13),
];

#[derive(Debug, Clone)]
pub struct Catalog {
    defs: Vec<FunctionDef>,
}

impl Default for Catalog {
    fn default() -> Self {
        Self::classical()
    }
}

impl Catalog {
    pub fn classical() -> Self {
        Self {
            defs: CLASSICAL.to_vec(),
        }
    }

    /// Adds or replaces a definition by name.
    pub fn register(&mut self, def: FunctionDef) {
        match self.defs.iter_mut().find(|d| d.name == def.name) {
            Some(slot) => *slot = def,
            None => self.defs.push(def),
        }
    }

    pub fn get(&self, name: &str) -> Option<&FunctionDef> {
        self.defs.iter().find(|d| d.name == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &FunctionDef> {
        self.defs.iter()
    }

    pub fn instantiate(&self, name: &str, dimension: usize) -> Result<ObjectiveFunction> {
        let def = self
            .get(name)
            .ok_or_else(|| Error::config(format!("unknown function `{name}`")))?;
        ObjectiveFunction::new(*def, dimension)
    }
}

/// A catalog function fixed to a dimension and search box.
#[derive(Debug, Clone)]
pub struct ObjectiveFunction {
    def: FunctionDef,
    space: SearchSpace,
}

impl ObjectiveFunction {
    pub fn new(def: FunctionDef, dimension: usize) -> Result<Self> {
        if dimension < def.min_dimension {
            return Err(Error::config(format!(
                "`{}` needs dimension >= {}, got {dimension}",
                def.name, def.min_dimension
            )));
        }
        let space = SearchSpace::uniform(dimension, def.lower, def.upper)?;
        Ok(Self { def, space })
    }

    /// Overrides the default search box.
    pub fn with_space(mut self, space: SearchSpace) -> Result<Self> {
        Error::check_dim(self.dimension(), space.dimension())?;
        self.space = space;
        Ok(self)
    }

    pub fn name(&self) -> &'static str {
        self.def.name
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn f_star(&self) -> f64 {
        self.def.f_star
    }

    pub fn x_star(&self) -> Option<Vec<f64>> {
        self.def.optimum.point(self.dimension())
    }
}

impl Objective for ObjectiveFunction {
    fn dimension(&self) -> usize {
        self.space.dimension()
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Error::check_dim(self.dimension(), x.len())?;
        Ok((self.def.eval)(x))
    }
}

/// `base(R (x - shift))` on the box `[-100, 100]^D`.
#[derive(Debug, Clone)]
pub struct Transform {
    pub shift: Vec<f64>,
    /// `None` means the identity.
    pub rotation: Option<DMatrix<f64>>,
    pub base: ObjectiveFunction,
    space: SearchSpace,
}

impl Transform {
    pub fn new(base: ObjectiveFunction, shift: Vec<f64>, rotation: Option<DMatrix<f64>>) -> Result<Self> {
        let d = base.dimension();
        Error::check_dim(d, shift.len())?;
        if let Some(r) = &rotation {
            Error::check_dim(d, r.nrows())?;
            Error::check_dim(d, r.ncols())?;
        }
        let space = SearchSpace::uniform(d, -TRANSFORMED_BOUND, TRANSFORMED_BOUND)?;
        Ok(Self {
            shift,
            rotation,
            base,
            space,
        })
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn f_star(&self) -> f64 {
        self.base.f_star()
    }

    /// The point mapped onto the base function's domain.
    pub fn map_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(self.shift.len(), x.len())?;
        let centered: Vec<f64> = x.iter().zip(&self.shift).map(|(a, s)| a - s).collect();
        Ok(match &self.rotation {
            None => centered,
            Some(r) => (r * DVector::from_vec(centered)).data.into(),
        })
    }
}

pub fn apply_transform(t: &Transform, x: &[f64]) -> Result<f64> {
    let z = t.map_point(x)?;
    t.base.evaluate(&z)
}

impl Objective for Transform {
    fn dimension(&self) -> usize {
        self.shift.len()
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        apply_transform(self, x)
    }
}

/// Shift from explicit unit draws: `-80 + 160 u`.
pub fn shift_from_draws(draws: &[f64]) -> Vec<f64> {
    draws
        .iter()
        .map(|u| -SHIFT_BOUND + u * 2.0 * SHIFT_BOUND)
        .collect()
}

pub fn random_shift(d: usize, rng: &mut RngStream) -> Vec<f64> {
    let draws: Vec<f64> = (0..d).map(|_| rng.uniform_closed()).collect();
    shift_from_draws(&draws)
}

/// Random orthogonal matrix from the QR factorisation of a Gaussian matrix,
/// with column signs fixed so the distribution is uniform over O(d).
pub fn random_rotation(d: usize, rng: &mut RngStream) -> Result<DMatrix<f64>> {
    if d == 0 {
        return Err(Error::config("rotation dimension must be at least 1"));
    }
    let gaussian = DMatrix::from_fn(d, d, |_, _| rng.standard_normal());
    let qr = gaussian.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(q)
}
