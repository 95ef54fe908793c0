//! File writers and readers for campaign results.
//!
//! Every float is written in its shortest round-trip decimal form, so a value
//! read back from any data file is bit-identical to the one computed.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::ExperimentResult;
use crate::stats::{BoxSummary, ConvergenceSeries, RankingTable};

pub const ERRORS_FILE: &str = "errors.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CELLS_FILE: &str = "cells.csv";
pub const TRACES_FILE: &str = "traces.csv";
pub const RESULTS_FILE: &str = "results.json";
pub const METADATA_FILE: &str = "metadata.json";
pub const RANKING_FILE: &str = "ranking.csv";

/// Shortest decimal string that parses back to exactly `x`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn parse_f64(field: &str) -> Option<f64> {
    field.trim().parse().ok()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::Writer::from_writer(fs::File::create(path)?))
}

fn csv_err(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::data(e.to_string())
    }
}

fn write_rows(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// `algorithm,function,trial,seed,error`, one row per successful trial.
pub fn write_errors(path: &Path, result: &ExperimentResult) -> Result<()> {
    let rows = result.cells.iter().flat_map(|c| {
        c.traces.iter().zip(&c.errors).map(move |(t, e)| {
            vec![
                c.algorithm.clone(),
                c.function.clone(),
                t.trial_index.to_string(),
                t.seed.to_string(),
                fmt_f64(*e),
            ]
        })
    });
    write_rows(path, &strings(&["algorithm", "function", "trial", "seed", "error"]), rows)
}

/// Mean errors with functions as rows and algorithms as columns. Failed
/// cells are left empty.
pub fn write_summary(path: &Path, result: &ExperimentResult) -> Result<()> {
    let mut header = vec!["function".to_string()];
    header.extend(result.algorithms.iter().cloned());
    let rows = result.functions.iter().map(|f| {
        let mut row = vec![f.name.clone()];
        for a in &result.algorithms {
            row.push(
                result
                    .cell(a, &f.name)
                    .and_then(|c| c.mean_error)
                    .map(fmt_f64)
                    .unwrap_or_default(),
            );
        }
        row
    });
    write_rows(path, &header, rows)
}

pub fn write_cells(path: &Path, result: &ExperimentResult) -> Result<()> {
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    let rows = result.cells.iter().map(|c| {
        vec![
            c.algorithm.clone(),
            c.function.clone(),
            c.dimension.to_string(),
            fmt_f64(c.f_star),
            c.errors.len().to_string(),
            opt(c.mean_error),
            opt(c.std_error),
            c.diagnostic.clone().unwrap_or_default(),
        ]
    });
    let header = strings(&["algorithm", "function", "dimension", "f_star", "trials", "mean", "std", "diagnostic"]);
    write_rows(path, &header, rows)
}

/// Best-so-far fitness per generation for every trial.
pub fn write_traces(path: &Path, result: &ExperimentResult) -> Result<()> {
    let np = result.config.np as u64;
    let header = strings(&["algorithm", "function", "trial", "generation", "evaluations", "best"]);
    let mut w = csv_writer(path)?;
    w.write_record(&header).map_err(csv_err)?;
    for t in result.traces() {
        for (g, best) in t.best_per_generation.iter().enumerate() {
            w.write_record([
                t.algorithm.as_str(),
                t.function.as_str(),
                &t.trial_index.to_string(),
                &g.to_string(),
                &(np * g as u64).to_string(),
                &fmt_f64(*best),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut file = io::BufWriter::new(fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut file, value).map_err(|e| Error::data(e.to_string()))?;
    file.write_all(b"\n")?;
    file.flush()?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<ExperimentResult> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        message: format!("{}: {e}", path.display()),
    })
}

/// A functions x algorithms table of mean errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub algorithms: Vec<String>,
    pub functions: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

pub fn read_summary(path: &Path) -> Result<SummaryTable> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(fs::File::open(path)?);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.get(0) != Some("function") {
        return Err(Error::Parse {
            line: 1,
            message: "summary header must start with `function`".into(),
        });
    }
    let algorithms: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut functions = Vec::new();
    let mut values = Vec::new();
    for (i, record) in r.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse { line, message: e.to_string() })?;
        let mut row = Vec::with_capacity(algorithms.len());
        for (k, field) in record.iter().skip(1).enumerate() {
            let v = parse_f64(field).filter(|v| !v.is_nan()).ok_or_else(|| Error::Parse {
                line,
                message: format!("`{field}` is not a number (column {})", algorithms[k]),
            })?;
            row.push(v);
        }
        functions.push(record[0].to_owned());
        values.push(row);
    }
    Ok(SummaryTable {
        algorithms,
        functions,
        values,
    })
}

/// Per-function error samples in first-appearance order.
pub type ErrorSamples = Vec<(String, Vec<(String, Vec<f64>)>)>;

pub fn read_errors(path: &Path) -> Result<ErrorSamples> {
    let mut r = csv::Reader::from_reader(fs::File::open(path)?);
    let mut out: ErrorSamples = Vec::new();
    for (i, record) in r.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse { line, message: e.to_string() })?;
        let (alg, func) = (&record[0], &record[1]);
        let err = record.get(4).and_then(parse_f64).ok_or_else(|| Error::Parse {
            line,
            message: "missing or malformed error value".into(),
        })?;
        let f = match out.iter().position(|(name, _)| name == func) {
            Some(p) => p,
            None => {
                out.push((func.to_owned(), Vec::new()));
                out.len() - 1
            }
        };
        let algs = &mut out[f].1;
        match algs.iter_mut().find(|(name, _)| name == alg) {
            Some((_, v)) => v.push(err),
            None => algs.push((alg.to_owned(), vec![err])),
        }
    }
    Ok(out)
}

/// `Algorithm,AverageRanking,Normalized,Ranks` at full precision.
pub fn write_ranking(path: &Path, table: &RankingTable) -> Result<()> {
    let rows = table.entries.iter().map(|e| {
        vec![
            e.algorithm.clone(),
            fmt_f64(e.average_rank),
            fmt_f64(e.normalized),
            e.ordinal.to_string(),
        ]
    });
    write_rows(path, &strings(&["Algorithm", "AverageRanking", "Normalized", "Ranks"]), rows)
}

pub fn write_box(path: &Path, boxes: &[BoxSummary]) -> Result<()> {
    let rows = boxes.iter().map(|b| {
        vec![
            b.label.clone(),
            fmt_f64(b.min),
            fmt_f64(b.q1),
            fmt_f64(b.median),
            fmt_f64(b.q3),
            fmt_f64(b.max),
        ]
    });
    write_rows(path, &strings(&["algorithm", "min", "q1", "median", "q3", "max"]), rows)
}

/// All series must share the same x axis.
pub fn write_convergence(path: &Path, series: &[ConvergenceSeries]) -> Result<()> {
    let Some(first) = series.first() else {
        return Err(Error::data("no convergence series to write"));
    };
    if series.iter().any(|s| s.xs != first.xs || s.ys.len() != first.xs.len()) {
        return Err(Error::data("convergence series have different lengths"));
    }
    let mut header = vec!["evaluations".to_string()];
    header.extend(series.iter().map(|s| s.label.clone()));
    let rows = first.xs.iter().enumerate().map(|(i, x)| {
        let mut row = vec![fmt_f64(*x)];
        row.extend(series.iter().map(|s| fmt_f64(s.ys[i])));
        row
    });
    write_rows(path, &header, rows)
}

/// File-name-safe form of a function name (`shifted/sphere` → `shifted__sphere`).
pub fn file_stem(function: &str) -> String {
    function.replace('/', "__")
}
