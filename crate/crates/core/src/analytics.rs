//! Read-only analyses over a built triangle: where each row peaks, how the
//! logarithm of each column grows, and how spread out each row is compared
//! with the matching row of Pascal's triangle.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::triangle::{DistributionRow, Triangle};

/// Largest `n` for which [`pascal_row`] returns exact `u64` tallies.
pub const PASCAL_EXACT_MAX: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MaxColumn {
    pub index: usize,
    pub count: u64,
    /// Another dimension has the same count.
    pub tied: bool,
}

/// Smallest dimension holding the largest count, and whether that maximum is
/// shared. For rows with `n >= 1` the dimension-0 cell is left out: it always
/// holds just the number 1.
pub fn max_column(row: &DistributionRow) -> MaxColumn {
    let skip = usize::from(row.exponent() >= 1);
    let cells = &row.counts()[skip..];
    let count = cells.iter().copied().max().unwrap_or(0);
    let index = skip + cells.iter().position(|&c| c == count).unwrap_or(0);
    let tied = cells.iter().filter(|&&c| c == count).count() > 1;
    MaxColumn { index, count, tied }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub exponent: u32,
    pub column: usize,
}

/// Rows whose maximum column differs from the previous row's, starting the
/// comparison at row 1.
pub fn max_column_transitions(t: &Triangle) -> Vec<Transition> {
    t.rows()
        .iter()
        .skip(1)
        .map(|r| (r.exponent(), max_column(r).index))
        .collect::<Vec<_>>()
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| Transition {
            exponent: w[1].0,
            column: w[1].1,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiffEntry {
    pub exponent: u32,
    pub ln_count: f64,
    /// `ln_count(n) - ln_count(n - 1)`; absent when row `n - 1` has no entry.
    pub diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffSeries {
    pub column: u32,
    pub entries: Vec<DiffEntry>,
}

impl DiffSeries {
    pub fn diffs(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().filter_map(|e| e.diff)
    }
}

/// Natural log of column `x` down the triangle with neighbour differences.
/// Zero counts are skipped.
pub fn column_diffs(t: &Triangle, x: u32) -> Result<DiffSeries> {
    if x > t.max_exponent() {
        return Err(Error::usage(format!(
            "column must be at most {}, got {x}",
            t.max_exponent()
        )));
    }
    let mut entries: Vec<DiffEntry> = Vec::new();
    for row in &t.rows()[x as usize..] {
        let count = row.get(x as usize);
        if count == 0 {
            continue;
        }
        let ln_count = (count as f64).ln();
        let diff = entries
            .last()
            .filter(|prev| prev.exponent + 1 == row.exponent())
            .map(|prev| ln_count - prev.ln_count);
        entries.push(DiffEntry {
            exponent: row.exponent(),
            ln_count,
            diff,
        });
    }
    Ok(DiffSeries { column: x, entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailStats {
    pub window: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub stddev: f64,
}

/// Mean and spread of the last `window` differences.
pub fn diff_tail_stats(series: &DiffSeries, window: usize) -> Result<TailStats> {
    if window < 2 {
        return Err(Error::usage(format!(
            "window must be at least 2, got {window}"
        )));
    }
    let diffs: Vec<f64> = series.diffs().collect();
    if diffs.len() < window {
        return Err(Error::usage(format!(
            "column {} has {} differences, window needs {window}",
            series.column,
            diffs.len()
        )));
    }
    let tail = &diffs[diffs.len() - window..];
    let mean = tail.iter().sum::<f64>() / window as f64;
    let var = tail.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / window as f64;
    Ok(TailStats {
        window,
        mean,
        stddev: var.sqrt(),
    })
}

/// Gibbs entropy `-sum p ln p` (Boltzmann constant 1) of `counts / total`.
pub fn row_entropy(counts: &[u64], total: u64) -> Result<f64> {
    let sum: u128 = counts.iter().map(|&c| c as u128).sum();
    if total == 0 || sum != total as u128 {
        return Err(Error::Integrity {
            exponent: 0,
            reason: format!("entropy: counts sum to {sum}, total given as {total}"),
        });
    }
    let total = total as f64;
    Ok(counts.iter().filter(|&&c| c > 0).fold(0.0, |acc, &c| {
        let p = c as f64 / total;
        acc - p * p.ln()
    }))
}

/// Binomial coefficients `C(n, 0..=n)`.
pub fn pascal_row(n: u32) -> Result<Vec<u64>> {
    if n > PASCAL_EXACT_MAX {
        return Err(Error::usage(format!(
            "exact Pascal rows stop at n = {PASCAL_EXACT_MAX}; use pascal_entropy for row {n}"
        )));
    }
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c: u128 = 1;
    row.push(1);
    for k in 0..n as u128 {
        c = c * (n as u128 - k) / (k + 1);
        row.push(c as u64);
    }
    Ok(row)
}

/// Entropy of Pascal row `n` normalized by `2^n`, from log-gamma binomials.
pub fn pascal_entropy_log(n: u32) -> f64 {
    let n_f = n as f64;
    let ln_total = n_f * std::f64::consts::LN_2;
    let ln_n_fact = ln_gamma(n_f + 1.0);
    (0..=n).fold(0.0, |acc, k| {
        let k = k as f64;
        let ln_p = ln_n_fact - ln_gamma(k + 1.0) - ln_gamma(n_f - k + 1.0) - ln_total;
        acc - ln_p.exp() * ln_p
    })
}

/// Exact tallies up to [`PASCAL_EXACT_MAX`], log-gamma beyond.
pub fn pascal_entropy(n: u32) -> f64 {
    match pascal_row(n) {
        Ok(row) => row_entropy(&row, 1u64 << n).expect("binomial row sums to 2^n"),
        Err(_) => pascal_entropy_log(n),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyEntry {
    pub exponent: u32,
    pub s_dim: f64,
    pub s_pascal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub entries: Vec<EntropyEntry>,
}

pub fn entropy_report(t: &Triangle) -> EntropyReport {
    let entries = t
        .rows()
        .iter()
        .map(|row| EntropyEntry {
            exponent: row.exponent(),
            s_dim: row_entropy(row.counts(), row.total()).expect("validated row"),
            s_pascal: pascal_entropy(row.exponent()),
        })
        .collect();
    EntropyReport { entries }
}
