//! Experiment specification documents.
//!
//! A spec is a flat TOML document:
//!
//! ```toml
//! seed = 42                       # required
//! np = 200                        # default 200
//! max_iterations = 1000           # default 1000
//! trials = 50                     # default 50
//! dimension = 30                  # default for functions without one
//! q1 = 10                         # hybrid stagnation limits, default 10
//! q2 = 10
//! q3 = 10
//! de_f = 0.5                      # DE/best/1/bin control parameters
//! de_cr = 0.9
//! algorithms = ["gwo_de", "gwo", "jde", "de_best_1_bin"]
//! functions = ["sphere", { name = "rastrigin", dimension = 10 }]
//! output = "results"
//! formats = ["csv", "json"]
//! ```

use std::ops::Range;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::benchmarks::Catalog;
use crate::de::DeControl;
use crate::error::{Error, Result};
use crate::harness::{FunctionRef, Problem, Registry, RunConfig};
use crate::hybrid::SwitchThresholds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub config: RunConfig,
    pub algorithms: Vec<String>,
    pub functions: Vec<FunctionRef>,
    pub output: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl ExperimentSpec {
    pub fn algorithm_refs(&self) -> Vec<&str> {
        self.algorithms.iter().map(String::as_str).collect()
    }

    pub fn wants(&self, format: OutputFormat) -> bool {
        self.formats.contains(&format)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawFunction {
    Name(String),
    Table { name: String, dimension: Option<usize> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    seed: Option<Spanned<u64>>,
    np: Option<Spanned<usize>>,
    max_iterations: Option<Spanned<usize>>,
    trials: Option<Spanned<usize>>,
    dimension: Option<Spanned<usize>>,
    q1: Option<usize>,
    q2: Option<usize>,
    q3: Option<usize>,
    de_f: Option<Spanned<f64>>,
    de_cr: Option<Spanned<f64>>,
    algorithms: Spanned<Vec<Spanned<String>>>,
    functions: Spanned<Vec<Spanned<RawFunction>>>,
    output: Option<PathBuf>,
    formats: Option<Spanned<Vec<OutputFormat>>>,
}

/// Serialized form; mirrors [`RawSpec`] without spans.
#[derive(Serialize)]
struct SpecDocument<'a> {
    seed: u64,
    np: usize,
    max_iterations: usize,
    trials: usize,
    dimension: usize,
    q1: usize,
    q2: usize,
    q3: usize,
    de_f: f64,
    de_cr: f64,
    algorithms: &'a [String],
    functions: &'a [FunctionRef],
    output: &'a PathBuf,
    formats: &'a [OutputFormat],
}

fn line_of(text: &str, span: Range<usize>) -> usize {
    let end = span.start.min(text.len());
    text[..end].bytes().filter(|&b| b == b'\n').count() + 1
}

fn at<T>(text: &str, value: &Spanned<T>, message: impl Into<String>) -> Error {
    Error::Parse {
        line: line_of(text, value.span()),
        message: message.into(),
    }
}

/// Parses and validates a spec, resolving every algorithm and function name.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec> {
    parse_spec_with(text, &Registry::default(), &Catalog::classical())
}

pub fn parse_spec_with(text: &str, registry: &Registry, catalog: &Catalog) -> Result<ExperimentSpec> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map_or(1, |s| line_of(text, s)),
        message: e.message().trim().to_owned(),
    })?;

    let seed = raw.seed.ok_or_else(|| Error::Parse {
        line: 1,
        message: "missing required key `seed`".into(),
    })?;
    let defaults = RunConfig::default();
    let pick = |v: &Option<Spanned<usize>>, d: usize| v.as_ref().map_or(d, |s| *s.get_ref());

    let np = pick(&raw.np, defaults.np);
    if np < 4 {
        return Err(at(text, raw.np.as_ref().unwrap(), format!("`np` must be at least 4, got {np}")));
    }
    let trials = pick(&raw.trials, defaults.trials);
    if trials == 0 {
        return Err(at(text, raw.trials.as_ref().unwrap(), "`trials` must be at least 1"));
    }
    let dimension = pick(&raw.dimension, defaults.dimension);
    if dimension == 0 {
        return Err(at(text, raw.dimension.as_ref().unwrap(), "`dimension` must be at least 1"));
    }
    let max_iterations = pick(&raw.max_iterations, defaults.max_iterations);

    let de_f = raw.de_f.as_ref().map_or(defaults.de.f, |s| *s.get_ref());
    let de_cr = raw.de_cr.as_ref().map_or(defaults.de.cr, |s| *s.get_ref());
    let de = DeControl::new(de_f, de_cr).map_err(|e| {
        let span = raw.de_f.as_ref().map(|s| s.span()).or(raw.de_cr.as_ref().map(|s| s.span()));
        Error::Parse {
            line: span.map_or(1, |s| line_of(text, s)),
            message: e.to_string(),
        }
    })?;

    let d = SwitchThresholds::default();
    let config = RunConfig {
        np,
        max_iterations,
        trials,
        base_seed: *seed.get_ref(),
        dimension,
        thresholds: SwitchThresholds {
            q1: raw.q1.unwrap_or(d.q1),
            q2: raw.q2.unwrap_or(d.q2),
            q3: raw.q3.unwrap_or(d.q3),
        },
        de,
        jde: defaults.jde,
    };

    if raw.algorithms.get_ref().is_empty() {
        return Err(at(text, &raw.algorithms, "`algorithms` must not be empty"));
    }
    let mut algorithms = Vec::new();
    for a in raw.algorithms.get_ref() {
        registry
            .get(a.get_ref())
            .map_err(|e| at(text, a, format!("in `algorithms`: {e}")))?;
        if algorithms.contains(a.get_ref()) {
            return Err(at(text, a, format!("duplicate algorithm `{}`", a.get_ref())));
        }
        algorithms.push(a.get_ref().clone());
    }

    if raw.functions.get_ref().is_empty() {
        return Err(at(text, &raw.functions, "`functions` must not be empty"));
    }
    let mut functions: Vec<FunctionRef> = Vec::new();
    for f in raw.functions.get_ref() {
        let fref = match f.get_ref() {
            RawFunction::Name(name) => FunctionRef::new(name.clone(), dimension),
            RawFunction::Table { name, dimension: d } => FunctionRef::new(name.clone(), d.unwrap_or(dimension)),
        };
        Problem::resolve(catalog, &fref.name, fref.dimension, config.base_seed)
            .map_err(|e| at(text, f, format!("in `functions`: {e}")))?;
        if functions.iter().any(|g| g.name == fref.name) {
            return Err(at(text, f, format!("duplicate function `{}`", fref.name)));
        }
        functions.push(fref);
    }

    let formats = match raw.formats {
        Some(f) if f.get_ref().is_empty() => return Err(at(text, &f, "`formats` must not be empty")),
        Some(f) => f.into_inner(),
        None => vec![OutputFormat::Csv, OutputFormat::Json],
    };

    Ok(ExperimentSpec {
        config,
        algorithms,
        functions,
        output: raw.output.unwrap_or_else(|| PathBuf::from("results")),
        formats,
    })
}

/// Renders a spec as a document that [`parse_spec`] reads back unchanged.
pub fn serialize_spec(spec: &ExperimentSpec) -> Result<String> {
    let c = &spec.config;
    let doc = SpecDocument {
        seed: c.base_seed,
        np: c.np,
        max_iterations: c.max_iterations,
        trials: c.trials,
        dimension: c.dimension,
        q1: c.thresholds.q1,
        q2: c.thresholds.q2,
        q3: c.thresholds.q3,
        de_f: c.de.f,
        de_cr: c.de.cr,
        algorithms: &spec.algorithms,
        functions: &spec.functions,
        output: &spec.output,
        formats: &spec.formats,
    };
    toml::to_string(&doc).map_err(|e| Error::data(format!("cannot serialize spec: {e}")))
}
