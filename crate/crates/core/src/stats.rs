//! Friedman rankings and plot-ready summaries of experiment results.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{compute_error, TrialTrace};

/// Errors are floored here before taking log10, so exact zeros plot at -300.
pub const LOG_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingEntry {
    pub algorithm: String,
    pub average_rank: f64,
    /// `average_rank / min(average_rank)`.
    pub normalized: f64,
    /// 1 for the smallest average rank; ties keep input order.
    pub ordinal: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingTable {
    /// In input order.
    pub entries: Vec<RankingEntry>,
    /// Number of functions (blocks) the ranks were averaged over.
    pub functions: usize,
    /// Friedman chi-square statistic, when computed from raw ranks.
    pub chi_square: Option<f64>,
}

impl RankingTable {
    pub fn entry(&self, algorithm: &str) -> Option<&RankingEntry> {
        self.entries.iter().find(|e| e.algorithm == algorithm)
    }
}

/// Ranks `row` from 1 (smallest) to K, giving tied values the mean of the
/// positions they occupy.
pub fn rank_row(row: &[f64]) -> Result<Vec<f64>> {
    if row.iter().any(|v| v.is_nan()) {
        return Err(Error::data("missing value in ranking row"));
    }
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| row[a].total_cmp(&row[b]));
    let mut ranks = vec![0.0; row.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && row[order[end]] == row[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    Ok(ranks)
}

/// Normalised and ordinal columns from precomputed average ranks.
pub fn ranking_from_averages(algorithms: &[String], averages: &[f64]) -> Result<RankingTable> {
    Error::check_dim(algorithms.len(), averages.len())?;
    if averages.len() < 2 {
        return Err(Error::data("ranking needs at least two algorithms"));
    }
    if averages.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::data("average ranks must be positive and finite"));
    }
    let min = averages.iter().copied().fold(f64::INFINITY, f64::min);

    let mut order: Vec<usize> = (0..averages.len()).collect();
    order.sort_by(|&a, &b| averages[a].total_cmp(&averages[b]));
    let mut ordinal = vec![0; averages.len()];
    for (pos, &i) in order.iter().enumerate() {
        ordinal[i] = pos + 1;
    }

    let entries = algorithms
        .iter()
        .zip(averages)
        .zip(ordinal)
        .map(|((name, &avg), ordinal)| RankingEntry {
            algorithm: name.clone(),
            average_rank: avg,
            normalized: avg / min,
            ordinal,
        })
        .collect();
    Ok(RankingTable {
        entries,
        functions: 0,
        chi_square: None,
    })
}

/// `12N / (K(K+1)) * (sum_j R_j^2 - K(K+1)^2 / 4)` for average ranks `R_j`.
pub fn friedman_statistic(average_ranks: &[f64], functions: usize) -> f64 {
    let k = average_ranks.len() as f64;
    let n = functions as f64;
    let sum_sq: f64 = average_ranks.iter().map(|r| r * r).sum();
    12.0 * n / (k * (k + 1.0)) * (sum_sq - k * (k + 1.0).powi(2) / 4.0)
}

/// Friedman average ranks over a `functions x algorithms` matrix of mean errors.
pub fn friedman_ranks(algorithms: &[String], mean_errors: &[Vec<f64>]) -> Result<RankingTable> {
    let k = algorithms.len();
    if k < 2 {
        return Err(Error::data("ranking needs at least two algorithms"));
    }
    if mean_errors.is_empty() {
        return Err(Error::data("ranking needs at least one function"));
    }
    let mut sums = vec![0.0; k];
    for (i, row) in mean_errors.iter().enumerate() {
        if row.len() != k {
            return Err(Error::data(format!(
                "row {i} has {} values, expected {k}",
                row.len()
            )));
        }
        let ranks = rank_row(row).map_err(|_| Error::data(format!("row {i} has a missing cell")))?;
        for (s, r) in sums.iter_mut().zip(ranks) {
            *s += r;
        }
    }
    let n = mean_errors.len();
    let averages: Vec<f64> = sums.iter().map(|s| s / n as f64).collect();
    let mut table = ranking_from_averages(algorithms, &averages)?;
    table.functions = n;
    table.chi_square = Some(friedman_statistic(&averages, n));
    Ok(table)
}

/// One-decimal display form used for ranking tables.
pub fn display_1dp(x: f64) -> String {
    format!("{x:.1}")
}

pub fn floored_log10(x: f64) -> f64 {
    x.max(LOG_FLOOR).log10()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSummary {
    pub label: String,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Linear interpolation between order statistics of a sorted slice.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Five-number summary of `log10` per-trial errors.
pub fn boxplot_stats(label: &str, errors: &[f64]) -> Result<BoxSummary> {
    if errors.is_empty() {
        return Err(Error::data("box plot needs at least one error value"));
    }
    let mut logs: Vec<f64> = errors.iter().map(|&e| floored_log10(e)).collect();
    if logs.iter().any(|v| v.is_nan()) {
        return Err(Error::data("error values must not be NaN"));
    }
    logs.sort_by(f64::total_cmp);
    Ok(BoxSummary {
        label: label.to_owned(),
        min: logs[0],
        q1: quantile_sorted(&logs, 0.25),
        median: quantile_sorted(&logs, 0.5),
        q3: quantile_sorted(&logs, 0.75),
        max: logs[logs.len() - 1],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSeries {
    pub label: String,
    /// Cumulative generational evaluations, `np * g`.
    pub xs: Vec<f64>,
    /// `log10` of the mean error across trials.
    pub ys: Vec<f64>,
}

/// Mean-then-log convergence curve over a set of equally long traces.
pub fn convergence_series(
    label: &str,
    traces: &[TrialTrace],
    np: usize,
    f_star: f64,
) -> Result<ConvergenceSeries> {
    let first = traces
        .first()
        .ok_or_else(|| Error::data("convergence series needs at least one trace"))?;
    let len = first.best_per_generation.len();
    if traces.iter().any(|t| t.best_per_generation.len() != len) {
        return Err(Error::data("traces differ in length"));
    }
    let n = traces.len() as f64;
    let xs = (0..len).map(|g| (np * g) as f64).collect();
    let ys = (0..len)
        .map(|g| {
            let mean = traces
                .iter()
                .map(|t| compute_error(t.best_per_generation[g], f_star))
                .sum::<f64>()
                / n;
            floored_log10(mean)
        })
        .collect();
    Ok(ConvergenceSeries {
        label: label.to_owned(),
        xs,
        ys,
    })
}
