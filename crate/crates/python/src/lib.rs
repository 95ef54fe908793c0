//! Python bindings: benchmark evaluation, seeded trials, whole campaigns,
//! Friedman ranking, and minimization of arbitrary Python callables.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use gwo_de::harness;
use gwo_de::{
    compute_error, Catalog, DeControl, Error, FunctionRef, Objective, Problem, Registry, RngStream, SearchSpace,
    SwitchThresholds, TrialTrace,
};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        Error::Config(_) | Error::Parse { .. } | Error::Data(_) | Error::Dimension { .. } | Error::Scope(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Run parameters; defaults follow the classical protocol (200 wolves,
/// 1000 generations, 50 trials, D = 30).
#[pyclass(name = "RunConfig", module = "gwo_de_py", skip_from_py_object)]
#[derive(Clone)]
struct PyRunConfig {
    #[pyo3(get, set)]
    np: usize,
    #[pyo3(get, set)]
    max_iterations: usize,
    #[pyo3(get, set)]
    trials: usize,
    #[pyo3(get, set)]
    seed: u64,
    #[pyo3(get, set)]
    dimension: usize,
    #[pyo3(get, set)]
    q1: usize,
    #[pyo3(get, set)]
    q2: usize,
    #[pyo3(get, set)]
    q3: usize,
    #[pyo3(get, set)]
    de_f: f64,
    #[pyo3(get, set)]
    de_cr: f64,
}

#[pymethods]
impl PyRunConfig {
    #[new]
    #[pyo3(signature = (np=200, max_iterations=1000, trials=50, seed=0, dimension=30, q1=10, q2=10, q3=10, de_f=0.5, de_cr=0.9))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        np: usize,
        max_iterations: usize,
        trials: usize,
        seed: u64,
        dimension: usize,
        q1: usize,
        q2: usize,
        q3: usize,
        de_f: f64,
        de_cr: f64,
    ) -> PyResult<Self> {
        let c = Self {
            np,
            max_iterations,
            trials,
            seed,
            dimension,
            q1,
            q2,
            q3,
            de_f,
            de_cr,
        };
        c.to_config()?;
        Ok(c)
    }

    /// Objective evaluations per trial, initialisation included.
    fn budget(&self) -> PyResult<u64> {
        Ok(self.to_config()?.budget())
    }

    fn __repr__(&self) -> String {
        format!(
            "RunConfig(np={}, max_iterations={}, trials={}, seed={}, dimension={}, q1={}, q2={}, q3={}, de_f={}, de_cr={})",
            self.np,
            self.max_iterations,
            self.trials,
            self.seed,
            self.dimension,
            self.q1,
            self.q2,
            self.q3,
            self.de_f,
            self.de_cr
        )
    }
}

impl PyRunConfig {
    fn to_config(&self) -> PyResult<harness::RunConfig> {
        let config = harness::RunConfig {
            np: self.np,
            max_iterations: self.max_iterations,
            trials: self.trials,
            base_seed: self.seed,
            dimension: self.dimension,
            thresholds: SwitchThresholds {
                q1: self.q1,
                q2: self.q2,
                q3: self.q3,
            },
            de: DeControl::new(self.de_f, self.de_cr).map_err(to_py_err)?,
            ..harness::RunConfig::default()
        };
        config.validate().map_err(to_py_err)?;
        Ok(config)
    }
}

fn config_or_default(config: Option<PyRef<'_, PyRunConfig>>) -> PyResult<harness::RunConfig> {
    match config {
        Some(c) => c.to_config(),
        None => Ok(harness::RunConfig::default()),
    }
}

fn trace_dict<'py>(py: Python<'py>, trace: &TrialTrace, f_star: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("algorithm", &trace.algorithm)?;
    d.set_item("function", &trace.function)?;
    d.set_item("trial_index", trace.trial_index)?;
    d.set_item("seed", trace.seed)?;
    d.set_item("best_per_generation", &trace.best_per_generation)?;
    d.set_item("best", trace.final_best())?;
    d.set_item("best_position", &trace.best_position)?;
    d.set_item("evaluations_used", trace.evaluations_used)?;
    if let Some(f_star) = f_star {
        d.set_item("error", compute_error(trace.final_best(), f_star))?;
    }
    let timeline = trace.mode_timeline.as_ref().map(|t| {
        t.iter()
            .map(|s| (s.generation, s.mode.as_str()))
            .collect::<Vec<_>>()
    });
    d.set_item("mode_timeline", timeline)?;
    Ok(d)
}

/// The benchmark catalog as a list of dicts.
#[pyfunction]
fn list_functions(py: Python<'_>) -> PyResult<Bound<'_, PyList>> {
    let list = PyList::empty(py);
    for def in Catalog::classical().iter() {
        let d = PyDict::new(py);
        d.set_item("name", def.name)?;
        d.set_item("min_dimension", def.min_dimension)?;
        d.set_item("lower", def.lower)?;
        d.set_item("upper", def.upper)?;
        d.set_item("f_star", def.f_star)?;
        list.append(d)?;
    }
    Ok(list)
}

/// Names accepted by `run_trial` and `minimize`.
#[pyfunction]
fn list_algorithms() -> Vec<String> {
    Registry::default().names()
}

/// Evaluates a catalog function (optionally `shifted/` or `shifted_rotated/`) at `x`.
#[pyfunction]
#[pyo3(signature = (name, x, seed=0))]
fn evaluate(name: &str, x: Vec<f64>, seed: u64) -> PyResult<f64> {
    let problem = Problem::resolve(&Catalog::classical(), name, x.len(), seed).map_err(to_py_err)?;
    problem.objective.evaluate(&x).map_err(to_py_err)
}

/// One seeded trial of `algorithm` on a catalog function.
#[pyfunction]
#[pyo3(signature = (algorithm, function, config=None, trial=0))]
fn run_trial<'py>(
    py: Python<'py>,
    algorithm: &str,
    function: &str,
    config: Option<PyRef<'py, PyRunConfig>>,
    trial: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let config = config_or_default(config)?;
    let problem =
        Problem::resolve(&Catalog::classical(), function, config.dimension, config.base_seed).map_err(to_py_err)?;
    let trace = py
        .detach(|| harness::run_trial(algorithm, &problem, &config, trial))
        .map_err(to_py_err)?;
    trace_dict(py, &trace, Some(problem.f_star))
}

/// A campaign over algorithms x functions. Returns mean and per-trial errors;
/// failed cells carry `None` and a diagnostic.
#[pyfunction]
#[pyo3(signature = (algorithms, functions, config=None, workers=1))]
fn run_experiment<'py>(
    py: Python<'py>,
    algorithms: Vec<String>,
    functions: Vec<String>,
    config: Option<PyRef<'py, PyRunConfig>>,
    workers: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let config = config_or_default(config)?;
    let frefs: Vec<FunctionRef> = functions
        .iter()
        .map(|f| FunctionRef::new(f.clone(), config.dimension))
        .collect();
    let names: Vec<&str> = algorithms.iter().map(String::as_str).collect();
    let result = py
        .detach(|| harness::run_experiment(&config, &names, &frefs, workers))
        .map_err(to_py_err)?;

    let cells = PyList::empty(py);
    for c in &result.cells {
        let d = PyDict::new(py);
        d.set_item("algorithm", &c.algorithm)?;
        d.set_item("function", &c.function)?;
        d.set_item("errors", &c.errors)?;
        d.set_item("mean", c.mean_error)?;
        d.set_item("std", c.std_error)?;
        d.set_item("diagnostic", &c.diagnostic)?;
        cells.append(d)?;
    }
    let mean_errors: Vec<Vec<Option<f64>>> = result
        .functions
        .iter()
        .map(|f| {
            result
                .algorithms
                .iter()
                .map(|a| result.cell(a, &f.name).and_then(|c| c.mean_error))
                .collect()
        })
        .collect();
    let out = PyDict::new(py);
    out.set_item("algorithms", &result.algorithms)?;
    out.set_item("functions", functions)?;
    out.set_item("mean_errors", mean_errors)?;
    out.set_item("cells", cells)?;
    Ok(out)
}

/// Friedman average ranks over a functions x algorithms matrix of mean errors.
#[pyfunction]
fn friedman_ranks<'py>(
    py: Python<'py>,
    algorithms: Vec<String>,
    mean_errors: Vec<Vec<f64>>,
) -> PyResult<Bound<'py, PyList>> {
    let table = gwo_de::friedman_ranks(&algorithms, &mean_errors).map_err(to_py_err)?;
    let list = PyList::empty(py);
    for e in &table.entries {
        let d = PyDict::new(py);
        d.set_item("algorithm", &e.algorithm)?;
        d.set_item("average_rank", e.average_rank)?;
        d.set_item("normalized", e.normalized)?;
        d.set_item("rank", e.ordinal)?;
        list.append(d)?;
    }
    Ok(list)
}

struct PyObjective {
    func: Py<PyAny>,
    dimension: usize,
}

impl Objective for PyObjective {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluate(&self, x: &[f64]) -> gwo_de::Result<f64> {
        Python::attach(|py| {
            self.func
                .bind(py)
                .call1((x.to_vec(),))
                .and_then(|v| v.extract::<f64>())
                .map_err(|e| Error::Objective(e.to_string()))
        })
    }
}

/// Minimizes a Python callable `func(list[float]) -> float` over the box
/// `[lower, upper]`.
#[pyfunction]
#[pyo3(signature = (func, lower, upper, algorithm="gwo_de", np=50, max_iterations=200, seed=0))]
#[allow(clippy::too_many_arguments)]
fn minimize<'py>(
    py: Python<'py>,
    func: Py<PyAny>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    algorithm: &str,
    np: usize,
    max_iterations: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let space = SearchSpace::new(lower, upper).map_err(to_py_err)?;
    let config = harness::RunConfig {
        np,
        max_iterations,
        trials: 1,
        base_seed: seed,
        dimension: space.dimension(),
        ..harness::RunConfig::default()
    };
    config.validate().map_err(to_py_err)?;
    let optimizer = Registry::default().get(algorithm).map_err(to_py_err)?;
    let objective = PyObjective {
        func,
        dimension: space.dimension(),
    };
    let trace = py
        .detach(|| {
            let mut rng = RngStream::new(seed, 0);
            optimizer.run(&config, &objective, &space, &mut rng)
        })
        .map_err(to_py_err)?;
    trace_dict(py, &trace, None)
}

#[pymodule]
fn gwo_de_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRunConfig>()?;
    m.add_function(wrap_pyfunction!(list_functions, m)?)?;
    m.add_function(wrap_pyfunction!(list_algorithms, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(run_trial, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(friedman_ranks, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    Ok(())
}
