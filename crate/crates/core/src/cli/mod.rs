//! Command-line front end: `list-functions`, `run`, `rank` and `export-plots`.
//!
//! Exit statuses: 0 success, 1 validation or usage error, 2 I/O error,
//! 3 internal error.

pub mod output;
pub mod spec;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::benchmarks::Catalog;
use crate::error::{Error, Result};
use crate::harness::{run_experiment, ExperimentResult};
use crate::stats::{boxplot_stats, convergence_series, display_1dp, friedman_ranks, BoxSummary, RankingTable};

pub use output::fmt_f64;
pub use spec::{parse_spec, serialize_spec, ExperimentSpec, OutputFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub const WORKERS_ENV: &str = "GWO_DE_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "gwo-de", version, about = "GWO, DE, jDE and the GWO-DE hybrid on classical benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the benchmark catalog: name, minimum dimension, box and optimum value.
    ListFunctions {
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Run every (algorithm, function, trial) cell of a spec.
    Run {
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the spec's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = WORKERS_ENV, default_value_t = 1)]
        workers: usize,
        /// Overrides the spec's formats; may be repeated.
        #[arg(long, value_enum)]
        format: Vec<OutputFormat>,
    },
    /// Friedman average ranks from a summary table.
    Rank {
        /// A summary.csv, or the directory holding one.
        results: PathBuf,
        /// Directory for ranking.csv; defaults to the directory of the input.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write plot data: box-plot quartiles of log10 errors, or mean convergence curves.
    ExportPlots {
        /// A results directory written by `run`.
        results: PathBuf,
        #[arg(long, value_enum)]
        kind: PlotKind,
        /// Defaults to `<results>/plots`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Box,
    Convergence,
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Io(_) => EXIT_IO,
        Error::Config(_) | Error::Parse { .. } | Error::Data(_) | Error::Dimension { .. } | Error::Scope(_) => {
            EXIT_VALIDATION
        }
        Error::State(_) | Error::Numeric(_) | Error::Objective(_) => EXIT_INTERNAL,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::ListFunctions { format } => {
            print!("{}", list_functions(&Catalog::classical(), format)?);
        }
        Command::Run {
            spec,
            out,
            workers,
            format,
        } => {
            let text = fs::read_to_string(&spec)?;
            let mut parsed = parse_spec(&text).map_err(|e| match e {
                Error::Parse { line, message } => Error::Parse {
                    line,
                    message: format!("{}: {message}", spec.display()),
                },
                e => e,
            })?;
            if let Some(out) = out {
                parsed.output = out;
            }
            if !format.is_empty() {
                parsed.formats = format;
            }
            let result = cmd_run(&parsed, workers)?;
            let failed = result.cells.iter().filter(|c| c.diagnostic.is_some()).count();
            println!(
                "{} cells ({} failed) written to {}",
                result.cells.len(),
                failed,
                parsed.output.display()
            );
        }
        Command::Rank { results, out } => {
            let table = cmd_rank(&results, out.as_deref())?;
            print!("{}", format_ranking(&table));
        }
        Command::ExportPlots { results, kind, out } => {
            let files = cmd_export_plots(&results, kind, out.as_deref())?;
            for f in files {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct FunctionListing<'a> {
    name: &'a str,
    min_dimension: usize,
    lower: f64,
    upper: f64,
    f_star: f64,
}

pub fn list_functions(catalog: &Catalog, format: OutputFormat) -> Result<String> {
    let rows: Vec<FunctionListing> = catalog
        .iter()
        .map(|d| FunctionListing {
            name: d.name,
            min_dimension: d.min_dimension,
            lower: d.lower,
            upper: d.upper,
            f_star: d.f_star,
        })
        .collect();
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&rows).map_err(|e| Error::data(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => {
            let mut s = String::from("name,min_dimension,lower,upper,f_star\n");
            for r in rows {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.name,
                    r.min_dimension,
                    fmt_f64(r.lower),
                    fmt_f64(r.upper),
                    fmt_f64(r.f_star)
                ));
            }
            Ok(s)
        }
    }
}

#[derive(Serialize)]
struct TrialTiming<'a> {
    algorithm: &'a str,
    function: &'a str,
    trial: u64,
    wall_time_seconds: f64,
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    version: &'static str,
    started_unix_seconds: f64,
    finished_unix_seconds: f64,
    wall_time_seconds: f64,
    workers: usize,
    trials: Vec<TrialTiming<'a>>,
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

/// Runs a campaign and writes its files into `spec.output`.
///
/// Data files depend only on the spec; timestamps and wall times go to
/// `metadata.json` alone.
pub fn cmd_run(spec: &ExperimentSpec, workers: usize) -> Result<ExperimentResult> {
    let out = &spec.output;
    fs::create_dir_all(out)?;
    let started = unix_now();
    let clock = Instant::now();
    let result = run_experiment(&spec.config, &spec.algorithm_refs(), &spec.functions, workers)?;
    let wall = clock.elapsed().as_secs_f64();

    output::write_errors(&out.join(output::ERRORS_FILE), &result)?;
    output::write_summary(&out.join(output::SUMMARY_FILE), &result)?;
    output::write_cells(&out.join(output::CELLS_FILE), &result)?;
    if spec.wants(OutputFormat::Json) {
        output::write_json(&out.join(output::RESULTS_FILE), &result)?;
    }
    if spec.wants(OutputFormat::Csv) {
        output::write_traces(&out.join(output::TRACES_FILE), &result)?;
    }
    let metadata = RunMetadata {
        version: env!("CARGO_PKG_VERSION"),
        started_unix_seconds: started,
        finished_unix_seconds: unix_now(),
        wall_time_seconds: wall,
        workers,
        trials: result
            .traces()
            .map(|t| TrialTiming {
                algorithm: &t.algorithm,
                function: &t.function,
                trial: t.trial_index,
                wall_time_seconds: t.wall_time,
            })
            .collect(),
    };
    output::write_json(&out.join(output::METADATA_FILE), &metadata)?;
    Ok(result)
}

fn summary_path(results: &Path) -> PathBuf {
    if results.is_dir() {
        results.join(output::SUMMARY_FILE)
    } else {
        results.to_path_buf()
    }
}

/// Ranks the algorithms of a summary table and writes `ranking.csv`.
pub fn cmd_rank(results: &Path, out: Option<&Path>) -> Result<RankingTable> {
    let path = summary_path(results);
    let summary = output::read_summary(&path)?;
    let table = friedman_ranks(&summary.algorithms, &summary.values)?;
    let dir = match out {
        Some(d) => d.to_path_buf(),
        None => path.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf),
    };
    fs::create_dir_all(&dir)?;
    output::write_ranking(&dir.join(output::RANKING_FILE), &table)?;
    Ok(table)
}

/// Human-readable ranking with one decimal place.
pub fn format_ranking(table: &RankingTable) -> String {
    let width = table.entries.iter().map(|e| e.algorithm.len()).max().unwrap_or(0).max(9);
    let mut s = format!("{:<width$}  {:>14}  {:>10}  {:>5}\n", "Algorithm", "AverageRanking", "Normalized", "Ranks");
    for e in &table.entries {
        s.push_str(&format!(
            "{:<width$}  {:>14}  {:>10}  {:>5}\n",
            e.algorithm,
            display_1dp(e.average_rank),
            display_1dp(e.normalized),
            e.ordinal
        ));
    }
    if let Some(chi) = table.chi_square {
        s.push_str(&format!("Friedman chi-square: {} over {} functions\n", display_1dp(chi), table.functions));
    }
    s
}

/// Writes one CSV per function: `box_<function>.csv` or `convergence_<function>.csv`.
pub fn cmd_export_plots(results: &Path, kind: PlotKind, out: Option<&Path>) -> Result<Vec<PathBuf>> {
    let dir = out.map_or_else(|| results.join("plots"), Path::to_path_buf);
    let json = results.join(output::RESULTS_FILE);
    let mut written = Vec::new();
    match kind {
        PlotKind::Box => {
            let samples = if json.is_file() {
                let r = output::read_results(&json)?;
                r.functions
                    .iter()
                    .map(|f| {
                        let algs = r
                            .algorithms
                            .iter()
                            .filter_map(|a| r.cell(a, &f.name))
                            .filter(|c| !c.errors.is_empty())
                            .map(|c| (c.algorithm.clone(), c.errors.clone()))
                            .collect();
                        (f.name.clone(), algs)
                    })
                    .collect()
            } else {
                output::read_errors(&results.join(output::ERRORS_FILE))?
            };
            fs::create_dir_all(&dir)?;
            for (function, algs) in samples {
                let boxes = algs
                    .iter()
                    .map(|(a, e)| boxplot_stats(a, e))
                    .collect::<Result<Vec<BoxSummary>>>()?;
                let path = dir.join(format!("box_{}.csv", output::file_stem(&function)));
                output::write_box(&path, &boxes)?;
                written.push(path);
            }
        }
        PlotKind::Convergence => {
            if !json.is_file() {
                return Err(Error::data(format!(
                    "{} not found; convergence plots need traces (run with --format json)",
                    json.display()
                )));
            }
            let r = output::read_results(&json)?;
            fs::create_dir_all(&dir)?;
            for f in &r.functions {
                let series = r
                    .algorithms
                    .iter()
                    .filter_map(|a| r.cell(a, &f.name))
                    .filter(|c| !c.traces.is_empty())
                    .map(|c| convergence_series(&c.algorithm, &c.traces, r.config.np, c.f_star))
                    .collect::<Result<Vec<_>>>()?;
                if series.is_empty() {
                    return Err(Error::data(format!("no traces for function {}", f.name)));
                }
                let path = dir.join(format!("convergence_{}.csv", output::file_stem(&f.name)));
                output::write_convergence(&path, &series)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}
