//! The dimensions-distribution triangle: row `n` counts the integers in
//! `[1, 2^n]` by dimension.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sieve::{self, SieveConfig, MAX_EXPONENT};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Version of the JSON layout written by [`export_triangle`].
pub const JSON_SCHEMA: u32 = 1;

/// Counts of each dimension within one `2^n` space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionRow {
    exponent: u32,
    counts: Vec<u64>,
}

impl DistributionRow {
    /// Validates length, total, and the fixed endpoint counts.
    pub fn new(exponent: u32, counts: Vec<u64>) -> Result<Self> {
        if exponent > MAX_EXPONENT {
            return Err(Error::integrity(
                exponent,
                format!("exponent exceeds supported maximum {MAX_EXPONENT}"),
            ));
        }
        if counts.len() != exponent as usize + 1 {
            return Err(Error::integrity(
                exponent,
                format!("expected {} cells, found {}", exponent + 1, counts.len()),
            ));
        }
        let sum = counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| Error::integrity(exponent, "sum overflows u64"))?;
        let total = 1u64 << exponent;
        if sum != total {
            return Err(Error::integrity(
                exponent,
                format!("sum {sum} != 2^{exponent} = {total}"),
            ));
        }
        if counts[0] != 1 {
            return Err(Error::integrity(
                exponent,
                format!("dimension 0 count is {}, expected 1", counts[0]),
            ));
        }
        if exponent >= 1 && counts[exponent as usize] != 1 {
            return Err(Error::integrity(
                exponent,
                format!(
                    "dimension {exponent} count is {}, expected 1",
                    counts[exponent as usize]
                ),
            ));
        }
        Ok(DistributionRow { exponent, counts })
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Count at dimension `d`, zero past the end of the row.
    pub fn get(&self, d: usize) -> u64 {
        self.counts.get(d).copied().unwrap_or(0)
    }

    /// `2^exponent`.
    pub fn total(&self) -> u64 {
        1u64 << self.exponent
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleMeta {
    /// Seconds since the Unix epoch.
    pub built_at: u64,
    pub tool_version: String,
    pub segment_size: u64,
}

impl TriangleMeta {
    fn now(segment_size: u64) -> Self {
        let built_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        TriangleMeta {
            built_at,
            tool_version: TOOL_VERSION.to_string(),
            segment_size,
        }
    }

    /// Placeholder for triangles read from formats that carry no metadata.
    fn unknown() -> Self {
        TriangleMeta {
            built_at: 0,
            tool_version: String::new(),
            segment_size: 0,
        }
    }
}

/// Rows for `n = 0..=max_exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangle {
    rows: Vec<DistributionRow>,
    meta: TriangleMeta,
}

impl Triangle {
    /// Checks that rows are numbered `0, 1, 2, ...` and that each row only
    /// adds to the previous one.
    pub fn from_rows(rows: Vec<DistributionRow>, meta: TriangleMeta) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::parse(0, "triangle has no rows"));
        }
        for (n, row) in rows.iter().enumerate() {
            if row.exponent as usize != n {
                return Err(Error::integrity(
                    row.exponent,
                    format!("found at position {n}, expected row 2^{n}"),
                ));
            }
            if n > 0 {
                let prev = &rows[n - 1];
                if let Some(d) = (0..n).find(|&d| row.counts[d] < prev.counts[d]) {
                    return Err(Error::integrity(
                        row.exponent,
                        format!(
                            "dimension {d} count {} is below the previous row's {}",
                            row.counts[d], prev.counts[d]
                        ),
                    ));
                }
            }
        }
        Ok(Triangle { rows, meta })
    }

    pub fn max_exponent(&self) -> u32 {
        (self.rows.len() - 1) as u32
    }

    pub fn rows(&self) -> &[DistributionRow] {
        &self.rows
    }

    pub fn row(&self, n: u32) -> Option<&DistributionRow> {
        self.rows.get(n as usize)
    }

    pub fn meta(&self) -> &TriangleMeta {
        &self.meta
    }
}

/// Builds rows `0..=max_exponent`. Row `n` is row `n - 1` plus a sieve of
/// `(2^(n-1), 2^n]`, so each integer is sieved once.
pub fn build_triangle(max_exponent: u32, config: &SieveConfig) -> Result<Triangle> {
    let primes = sieve::base_primes_for_exponent(max_exponent)?;
    let mut rows = Vec::with_capacity(max_exponent as usize + 1);
    rows.push(DistributionRow::new(0, vec![1])?);

    config.install(|| -> Result<()> {
        for n in 1..=max_exponent {
            let lo = (1u64 << (n - 1)) + 1;
            let hi = 1u64 << n;
            let fresh = sieve::count_range(lo, hi, &primes, config.segment_size()).map_err(
                |e| match e {
                    Error::Resource { reason, .. } => Error::Resource {
                        exponent: n,
                        reason,
                    },
                    other => other,
                },
            )?;
            let mut counts = rows[n as usize - 1].counts.clone();
            sieve::add_counts(&mut counts, &fresh);
            counts.resize(n as usize + 1, 0);
            rows.push(DistributionRow::new(n, counts)?);
        }
        Ok(())
    })??;

    Triangle::from_rows(rows, TriangleMeta::now(config.segment_size()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Tsv,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(Format::Tsv),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::usage(format!(
                "unknown format '{other}' (expected tsv, csv or json)"
            ))),
        }
    }
}

impl Format {
    pub(crate) fn delimiter(self) -> Option<char> {
        match self {
            Format::Tsv => Some('\t'),
            Format::Csv => Some(','),
            Format::Json => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonTriangle {
    schema: u32,
    max_exponent: u32,
    meta: TriangleMeta,
    rows: Vec<Vec<u64>>,
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>, sep: char) -> String {
    let mut out = String::new();
    for (i, item) in items.into_iter().enumerate() {
        if i > 0 {
            out.push(sep);
        }
        out.push_str(&item.to_string());
    }
    out
}

/// Renders the triangle. Delimited formats have a header of dimension indices
/// and one ragged row per exponent labelled `2^n`.
pub fn export_triangle(t: &Triangle, format: Format) -> String {
    let mut out = String::new();
    match format.delimiter() {
        Some(sep) => {
            out.push(sep);
            out.push_str(&join(0..=t.max_exponent(), sep));
            out.push('\n');
            for row in &t.rows {
                let _ = write!(out, "2^{}", row.exponent);
                for c in &row.counts {
                    out.push(sep);
                    let _ = write!(out, "{c}");
                }
                out.push('\n');
            }
        }
        None => {
            let meta = serde_json::to_string(&t.meta).expect("metadata serializes");
            let _ = writeln!(out, "{{");
            let _ = writeln!(out, "  \"schema\": {JSON_SCHEMA},");
            let _ = writeln!(out, "  \"max_exponent\": {},", t.max_exponent());
            let _ = writeln!(out, "  \"meta\": {meta},");
            let _ = writeln!(out, "  \"rows\": [");
            for (i, row) in t.rows.iter().enumerate() {
                let comma = if i + 1 < t.rows.len() { "," } else { "" };
                let _ = writeln!(
                    out,
                    "    [{}]{comma}",
                    row.counts
                        .iter()
                        .map(u64::to_string)
                        .collect::<Vec<_>>()
                        .join(", ")
                );
            }
            let _ = writeln!(out, "  ]");
            let _ = writeln!(out, "}}");
        }
    }
    out
}

/// Parses text in any export format. Every invariant is re-checked; nothing
/// is repaired.
pub fn import_triangle(text: &str, format: Format) -> Result<Triangle> {
    match format.delimiter() {
        Some(sep) => import_delimited(text, sep),
        None => import_json(text),
    }
}

fn import_json(text: &str) -> Result<Triangle> {
    let parsed: JsonTriangle =
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    if parsed.schema != JSON_SCHEMA {
        return Err(Error::parse(
            1,
            format!(
                "unsupported schema {} (expected {JSON_SCHEMA})",
                parsed.schema
            ),
        ));
    }
    if parsed.rows.len() != parsed.max_exponent as usize + 1 {
        return Err(Error::parse(
            1,
            format!(
                "max_exponent {} but {} rows",
                parsed.max_exponent,
                parsed.rows.len()
            ),
        ));
    }
    let rows = parsed
        .rows
        .into_iter()
        .enumerate()
        .map(|(n, counts)| DistributionRow::new(n as u32, counts))
        .collect::<Result<Vec<_>>>()?;
    Triangle::from_rows(rows, parsed.meta)
}

/// Accepts the exported layout, plus hand-written rows such as
/// `2^3: 1 4 2 1` where cells are separated by whitespace.
fn import_delimited(text: &str, sep: char) -> Result<Triangle> {
    let mut rows = Vec::new();
    let mut header: Option<(usize, usize)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields = split_fields(raw, sep);
        let Some(label) = fields.first().map(|s| s.trim_end_matches(':')) else {
            continue;
        };
        let Some(exp_text) = label.strip_prefix("2^") else {
            if rows.is_empty() && header.is_none() && label.is_empty() {
                header = Some((line_no, fields.len() - 1));
                let expected = (0..fields.len() - 1).map(|d| d.to_string());
                if !fields[1..].iter().map(|s| s.to_string()).eq(expected) {
                    return Err(Error::parse(
                        line_no,
                        "header must list dimensions 0, 1, 2, ...",
                    ));
                }
                continue;
            }
            return Err(Error::parse(
                line_no,
                format!("expected row label 2^n, found '{label}'"),
            ));
        };
        let exponent: u32 = exp_text
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad row label '{label}'")))?;
        if exponent as usize != rows.len() {
            return Err(Error::parse(
                line_no,
                format!("row 2^{exponent} out of order, expected 2^{}", rows.len()),
            ));
        }
        let cells = &fields[1..];
        if cells.len() != exponent as usize + 1 {
            return Err(Error::parse(
                line_no,
                format!(
                    "row 2^{exponent} has {} cells, expected {}",
                    cells.len(),
                    exponent + 1
                ),
            ));
        }
        let counts = cells
            .iter()
            .map(|c| {
                c.parse::<u64>()
                    .map_err(|_| Error::parse(line_no, format!("bad count '{c}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(DistributionRow::new(exponent, counts)?);
    }

    if let Some((line_no, width)) = header {
        if width != rows.len() {
            return Err(Error::parse(
                line_no,
                format!(
                    "header lists {width} dimensions but there are {} rows",
                    rows.len()
                ),
            ));
        }
    }
    Triangle::from_rows(rows, TriangleMeta::unknown())
}

fn split_fields(line: &str, sep: char) -> Vec<&str> {
    if line.contains(sep) {
        line.split(sep).map(str::trim).collect()
    } else {
        // No delimiter at all: either a one-cell row or whitespace-separated input.
        let mut parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() == 1 && line.starts_with(char::is_whitespace) {
            parts.insert(0, "");
        }
        parts
    }
}
