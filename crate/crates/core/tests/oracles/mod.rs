//! Brute-force reference implementations used to check the library.
//!
//! Nothing here calls into the code it checks.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fmt;

use gwo_de::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub case: String,
    pub expected: String,
    pub actual: String,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn numeric(case: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        Self {
            case: case.into(),
            expected: format!("{expected:e}"),
            actual: format!("{actual:e}"),
            tolerance,
            pass: (expected - actual).abs() <= tolerance,
        }
    }

    pub fn exact<T: fmt::Debug + PartialEq>(case: impl Into<String>, expected: &T, actual: &T) -> Self {
        Self {
            case: case.into(),
            expected: format!("{expected:?}"),
            actual: format!("{actual:?}"),
            tolerance: 0.0,
            pass: expected == actual,
        }
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "pass" } else { "FAIL" };
        write!(
            f,
            "{verdict} {}: expected {} actual {} (tol {})",
            self.case, self.expected, self.actual, self.tolerance
        )
    }
}

/// Exact distribution of binomial-crossover inheritance patterns.
///
/// A pattern is a string over `M` (from the mutant) and `T` (from the
/// target), one letter per coordinate.
pub fn crossover_enumeration(d: usize, cr: f64) -> Result<BTreeMap<String, f64>> {
    if d == 0 || d > 3 {
        return Err(Error::Scope(format!("crossover enumeration supports 1 <= d <= 3, got {d}")));
    }
    let mut dist = BTreeMap::new();
    for mask in 0..(1u32 << d) {
        let pattern: String = (0..d).map(|k| if mask & (1 << k) != 0 { 'M' } else { 'T' }).collect();
        dist.insert(pattern, 0.0);
    }
    for forced in 0..d {
        // every mask over the free coordinates: bit k set means "threshold passed"
        for mask in 0..(1u32 << d) {
            if mask & (1 << forced) != 0 {
                continue;
            }
            let mut p = 1.0 / d as f64;
            let mut pattern = String::new();
            for k in 0..d {
                if k == forced {
                    pattern.push('M');
                } else if mask & (1 << k) != 0 {
                    p *= cr;
                    pattern.push('M');
                } else {
                    p *= 1.0 - cr;
                    pattern.push('T');
                }
            }
            *dist.get_mut(&pattern).unwrap() += p;
        }
    }
    Ok(dist)
}

/// Average ranks by locating each value in a sorted copy of its row.
pub fn rank_averages(errors: &[Vec<f64>]) -> Vec<f64> {
    let k = errors[0].len();
    let mut totals = vec![0.0; k];
    for row in errors {
        let mut sorted = row.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (j, v) in row.iter().enumerate() {
            let positions: Vec<usize> = (0..k).filter(|&p| sorted[p] == *v).collect();
            let mean = positions.iter().map(|p| (p + 1) as f64).sum::<f64>() / positions.len() as f64;
            totals[j] += mean;
        }
    }
    totals.iter().map(|t| t / errors.len() as f64).collect()
}

/// `avg / min(avg)` and 1-based positions (ties broken by input order).
pub fn normalize_and_order(averages: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let min = averages.iter().cloned().fold(f64::INFINITY, f64::min);
    let normalized = averages.iter().map(|a| a / min).collect();
    let ordinal = averages
        .iter()
        .enumerate()
        .map(|(i, a)| {
            1 + averages
                .iter()
                .enumerate()
                .filter(|&(j, b)| b < a || (b == a && j < i))
                .count()
        })
        .collect();
    (normalized, ordinal)
}

/// Replays the switching rules on an improvement pattern. Modes are
/// numbered 1 (GWO), 2 (DE/best) and 3 (jDE); entries are
/// (first generation run in the mode, mode).
pub fn hybrid_timeline(pattern: &[bool], thresholds: [usize; 3]) -> Vec<(usize, u8)> {
    let mut mode = 1u8;
    let mut q = 0usize;
    let mut timeline = vec![(0, 1)];
    for (g, &improved) in pattern.iter().enumerate() {
        q = if improved { 0 } else { q + 1 };
        if q > thresholds[mode as usize - 1] {
            mode = if mode == 3 { 1 } else { mode + 1 };
            q = 0;
            timeline.push((g + 1, mode));
        }
    }
    timeline
}

#[cfg(test)]
mod self_checks {
    #[allow(unused_imports)]
    use super::*;

    #[test]
    fn crossover_hand_cases() {
        assert_eq!(crossover_enumeration(1, 0.3).unwrap()["M"], 1.0);
        let d2 = crossover_enumeration(2, 0.0).unwrap();
        assert_eq!(d2["MT"], 0.5);
        assert_eq!(d2["TM"], 0.5);
        assert_eq!(d2["TT"], 0.0);
        assert_eq!(d2["MM"], 0.0);
        assert_eq!(crossover_enumeration(2, 1.0).unwrap()["MM"], 1.0);
        let total: f64 = crossover_enumeration(3, 0.37).unwrap().values().sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!(matches!(crossover_enumeration(4, 0.5), Err(Error::Scope(_))));
    }

    #[test]
    fn timeline_hand_cases() {
        assert_eq!(hybrid_timeline(&[true; 20], [0, 0, 0]), vec![(0, 1)]);
        assert_eq!(hybrid_timeline(&[false; 3], [2, 10, 10]), vec![(0, 1), (3, 2)]);
        assert_eq!(
            hybrid_timeline(&[false; 4], [0, 0, 0]),
            vec![(0, 1), (1, 2), (2, 3), (3, 1), (4, 2)]
        );
    }

    #[test]
    fn rank_hand_cases() {
        assert_eq!(rank_averages(&[vec![3.0, 3.0, 3.0]]), vec![2.0, 2.0, 2.0]);
        assert_eq!(rank_averages(&[vec![0.1, 5.0], vec![9.0, 1.0]]), vec![1.5, 1.5]);
        let (n, o) = normalize_and_order(&[2.0, 1.0, 2.0]);
        assert_eq!(n, vec![2.0, 1.0, 2.0]);
        assert_eq!(o, vec![2, 1, 3]);
    }
}
