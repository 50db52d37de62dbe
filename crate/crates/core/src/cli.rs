//! Command-line front end. Data goes to the writer handed to [`run`];
//! diagnostics are returned as errors for the caller to print.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analytics::{self, EntropyReport};
use crate::cache;
use crate::error::{Error, Result};
use crate::oracle;
use crate::sieve::{self, SieveConfig, DEFAULT_SEGMENT_SIZE, MAX_EXPONENT, MIN_SEGMENT_SIZE};
use crate::tail::{self, MAX_TAIL_OFFSET};
use crate::triangle::{export_triangle, Format, Triangle};

/// Largest exponent `verify` checks against the brute-force oracle.
const VERIFY_ORACLE_MAX: u32 = 16;
/// Offsets `verify` checks against exact tail limits.
const VERIFY_TAIL_MAX: u32 = 8;

#[derive(Debug, Parser)]
#[command(
    name = "omega-triangle",
    version,
    about = "Count integers in [1, 2^n] by number of prime factors and analyse the resulting triangle"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Largest space exponent n; rows cover [1, 2^0] .. [1, 2^n].
    #[arg(long = "max-exp", global = true, default_value_t = 23)]
    pub max_exp: u32,

    /// Output format: tsv, csv or json.
    #[arg(long, global = true, default_value = "tsv", value_parser = parse_format)]
    pub format: Format,

    /// Triangle cache directory (overrides OMEGA_TRIANGLE_CACHE).
    #[arg(long = "cache-dir", global = true)]
    pub cache_dir: Option<PathBuf>,

    /// Always rebuild; never read or write the cache.
    #[arg(long = "no-cache", global = true)]
    pub no_cache: bool,

    /// Integers per sieve segment.
    #[arg(long = "segment-size", global = true, default_value_t = DEFAULT_SEGMENT_SIZE)]
    pub segment_size: u64,

    /// Worker threads, or "auto".
    #[arg(long, global = true, default_value = "auto", value_parser = parse_threads)]
    pub threads: Threads,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Threads(pub Option<usize>);

fn parse_threads(s: &str) -> std::result::Result<Threads, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Threads(None));
    }
    match s.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("expected a positive integer or 'auto', got '{s}'")),
        Ok(n) => Ok(Threads(Some(n))),
    }
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit the dimensions-distribution triangle.
    Triangle,
    /// Diagonal at offset x, its exact limit and where it is reached.
    Tail {
        #[arg(long)]
        x: u32,
        /// Also list every odd part counted by the limit.
        #[arg(long)]
        witnesses: bool,
    },
    /// Entropy of each triangle row next to the matching Pascal row.
    Entropy,
    /// Natural log of column x with neighbour differences.
    Diffs {
        #[arg(long)]
        x: u32,
        /// Summarize the last W differences.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Maximum column of every row and where it moves.
    Maxcol,
    /// Cross-check the sieve, row invariants and tail limits.
    Verify,
}

/// Validated settings shared by all subcommands.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub max_exponent: u32,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub sieve: SieveConfig,
}

impl CliConfig {
    pub fn from_args(args: &CommonArgs) -> Result<Self> {
        if args.max_exp > MAX_EXPONENT {
            return Err(Error::usage(format!(
                "--max-exp must be at most {MAX_EXPONENT}, got {}",
                args.max_exp
            )));
        }
        if args.segment_size < MIN_SEGMENT_SIZE {
            return Err(Error::usage(format!(
                "--segment-size must be at least {MIN_SEGMENT_SIZE}, got {}",
                args.segment_size
            )));
        }
        let cache_dir = if args.no_cache {
            None
        } else {
            args.cache_dir.clone().or_else(cache::default_cache_dir)
        };
        Ok(CliConfig {
            max_exponent: args.max_exp,
            format: args.format,
            cache_dir,
            sieve: SieveConfig::new(args.segment_size, args.threads.0)?,
        })
    }

    fn triangle(&self) -> Result<Triangle> {
        cache::load_or_build(self.max_exponent, &self.sieve, self.cache_dir.as_deref())
    }
}

/// Runs one parsed invocation, writing its data to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let config = CliConfig::from_args(&cli.common)?;
    let text = match &cli.command {
        Command::Triangle => cmd_triangle(&config)?,
        Command::Tail { x, witnesses } => cmd_tail(*x, *witnesses, &config)?,
        Command::Entropy => cmd_entropy(&config)?,
        Command::Diffs { x, window } => cmd_diffs(*x, *window, &config)?,
        Command::Maxcol => cmd_maxcol(&config)?,
        Command::Verify => {
            let (text, failures) = cmd_verify(&config)?;
            write_out(out, &text)?;
            if failures > 0 {
                return Err(Error::Integrity {
                    exponent: config.max_exponent,
                    reason: format!("verify: {failures} check(s) failed"),
                });
            }
            return Ok(());
        }
    };
    write_out(out, &text)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

/// Small delimited table used by the analysis commands.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn render(&self, sep: char, out: &mut String) {
        let sep = sep.to_string();
        out.push_str(&self.header.join(&sep));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(&sep));
            out.push('\n');
        }
    }
}

fn fixed6(v: f64) -> String {
    format!("{v:.6}")
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn cmd_triangle(config: &CliConfig) -> Result<String> {
    Ok(export_triangle(&config.triangle()?, config.format))
}

#[derive(Serialize)]
struct TailOutput<'a> {
    offset: u32,
    limit: u64,
    convergence_exponent: u32,
    confirmed: bool,
    values: &'a [tail::DiagonalValue],
    #[serde(skip_serializing_if = "Option::is_none")]
    witnesses: Option<&'a [tail::Witness]>,
}

pub fn cmd_tail(x: u32, witnesses: bool, config: &CliConfig) -> Result<String> {
    if x > MAX_TAIL_OFFSET {
        return Err(Error::usage(format!(
            "--x must be at most {MAX_TAIL_OFFSET}, got {x}"
        )));
    }
    let t = config.triangle()?;
    let series = tail::tail_series(&t, x)?;
    let n_star = series.convergence_exponent;
    let confirmed = n_star <= t.max_exponent();
    if let Some(bad) = series
        .values
        .iter()
        .find(|v| v.exponent >= n_star && v.count != series.limit)
    {
        return Err(Error::integrity(
            bad.exponent,
            format!(
                "diagonal {x} holds {} but its limit is {}",
                bad.count, series.limit
            ),
        ));
    }

    let mut s = String::new();
    match config.format.delimiter() {
        Some(sep) => {
            let status = if confirmed {
                "confirmed".to_string()
            } else {
                format!(
                    "unconfirmed: convergence exponent {n_star} is beyond row 2^{}",
                    t.max_exponent()
                )
            };
            let mut summary = Table::new(vec!["key", "value"]);
            summary.push(vec!["offset".into(), x.to_string()]);
            summary.push(vec!["limit".into(), series.limit.to_string()]);
            summary.push(vec!["convergence_exponent".into(), n_star.to_string()]);
            summary.push(vec!["status".into(), status]);
            summary.render(sep, &mut s);

            s.push('\n');
            let mut values = Table::new(vec!["n", "value"]);
            for v in &series.values {
                values.push(vec![v.exponent.to_string(), v.count.to_string()]);
            }
            values.render(sep, &mut s);

            if witnesses {
                s.push('\n');
                let mut w = Table::new(vec!["j", "q"]);
                for wit in &series.witnesses {
                    w.push(vec![wit.j.to_string(), wit.q.to_string()]);
                }
                w.render(sep, &mut s);
            }
        }
        None => {
            s = to_json(&TailOutput {
                offset: x,
                limit: series.limit,
                convergence_exponent: n_star,
                confirmed,
                values: &series.values,
                witnesses: witnesses.then_some(series.witnesses.as_slice()),
            });
        }
    }
    Ok(s)
}

pub fn render_entropy(report: &EntropyReport, format: Format) -> String {
    let Some(sep) = format.delimiter() else {
        return to_json(report);
    };
    let mut table = Table::new(vec!["n", "s_dim", "s_pascal"]);
    for e in &report.entries {
        table.push(vec![
            e.exponent.to_string(),
            fixed6(e.s_dim),
            fixed6(e.s_pascal),
        ]);
    }
    let mut s = String::new();
    table.render(sep, &mut s);
    s
}

pub fn cmd_entropy(config: &CliConfig) -> Result<String> {
    let t = config.triangle()?;
    Ok(render_entropy(
        &analytics::entropy_report(&t),
        config.format,
    ))
}

pub fn cmd_diffs(x: u32, window: Option<usize>, config: &CliConfig) -> Result<String> {
    let t = config.triangle()?;
    let series = analytics::column_diffs(&t, x)?;
    let stats = window
        .map(|w| analytics::diff_tail_stats(&series, w))
        .transpose()?;

    let Some(sep) = config.format.delimiter() else {
        #[derive(Serialize)]
        struct DiffsOutput<'a> {
            #[serde(flatten)]
            series: &'a analytics::DiffSeries,
            #[serde(skip_serializing_if = "Option::is_none")]
            tail_stats: Option<analytics::TailStats>,
        }
        return Ok(to_json(&DiffsOutput {
            series: &series,
            tail_stats: stats,
        }));
    };

    let mut s = String::new();
    let mut table = Table::new(vec!["n", "ln_count", "diff"]);
    for e in &series.entries {
        table.push(vec![
            e.exponent.to_string(),
            fixed6(e.ln_count),
            e.diff.map(fixed6).unwrap_or_default(),
        ]);
    }
    table.render(sep, &mut s);
    if let Some(st) = stats {
        s.push('\n');
        let mut summary = Table::new(vec!["window", "mean", "stddev"]);
        summary.push(vec![
            st.window.to_string(),
            fixed6(st.mean),
            fixed6(st.stddev),
        ]);
        summary.render(sep, &mut s);
    }
    Ok(s)
}

pub fn cmd_maxcol(config: &CliConfig) -> Result<String> {
    let t = config.triangle()?;
    let transitions = analytics::max_column_transitions(&t);
    let rows: Vec<(u32, analytics::MaxColumn)> = t
        .rows()
        .iter()
        .map(|r| (r.exponent(), analytics::max_column(r)))
        .collect();

    let Some(sep) = config.format.delimiter() else {
        #[derive(Serialize)]
        struct Row {
            exponent: u32,
            #[serde(flatten)]
            max: analytics::MaxColumn,
        }
        #[derive(Serialize)]
        struct MaxcolOutput {
            rows: Vec<Row>,
            transitions: Vec<analytics::Transition>,
        }
        return Ok(to_json(&MaxcolOutput {
            rows: rows
                .into_iter()
                .map(|(exponent, max)| Row { exponent, max })
                .collect(),
            transitions,
        }));
    };

    let mut table = Table::new(vec!["n", "max_column", "count", "tied", "transition"]);
    for (n, m) in rows {
        let moved = transitions.iter().any(|tr| tr.exponent == n);
        table.push(vec![
            n.to_string(),
            m.index.to_string(),
            m.count.to_string(),
            m.tied.to_string(),
            moved.to_string(),
        ]);
    }
    let mut s = String::new();
    table.render(sep, &mut s);
    Ok(s)
}

/// Report text and number of failed checks.
pub fn cmd_verify(config: &CliConfig) -> Result<(String, usize)> {
    let t = config.triangle()?;
    let mut report = String::new();
    let mut failures = 0;
    let mut check = |name: String, outcome: std::result::Result<(), String>| match outcome {
        Ok(()) => {
            let _ = writeln!(report, "ok\t{name}");
        }
        Err(why) => {
            failures += 1;
            let _ = writeln!(report, "FAIL\t{name}: {why}");
        }
    };

    let top = t.max_exponent();
    check(
        format!("row sums equal 2^n for n <= {top}"),
        t.rows()
            .iter()
            .find(|r| r.counts().iter().sum::<u64>() != r.total())
            .map_or(Ok(()), |r| Err(format!("row 2^{}", r.exponent()))),
    );

    let oracle_top = top.min(VERIFY_ORACLE_MAX);
    let primes = sieve::base_primes(((1u64 << oracle_top).isqrt()).max(2))?;
    let dims = sieve::segment_dimensions(1, 1 << oracle_top, &primes)?;
    let mismatch = dims.iter().enumerate().find_map(|(i, &d)| {
        let m = i as u64 + 1;
        let expected = oracle::omega_trial_division(m).ok()?.value();
        (expected != d as u32).then(|| format!("m = {m}: sieve {d}, trial division {expected}"))
    });
    check(
        format!("sieve matches trial division for every m <= 2^{oracle_top}"),
        mismatch.map_or(Ok(()), Err),
    );

    for n in 0..=oracle_top {
        let brute = oracle::row_by_bruteforce(n)?;
        let one_pass = sieve::count_dimensions(n, &config.sieve)?;
        let built = &t.rows()[n as usize];
        let outcome = if built != &brute {
            Err(format!(
                "triangle {:?} vs brute force {:?}",
                built.counts(),
                brute.counts()
            ))
        } else if one_pass != brute {
            Err(format!(
                "single pass {:?} vs brute force {:?}",
                one_pass.counts(),
                brute.counts()
            ))
        } else {
            Ok(())
        };
        check(format!("row 2^{n} matches brute force"), outcome);
    }

    for x in 0..=VERIFY_TAIL_MAX.min(top.saturating_sub(1)) {
        if top == 0 {
            break;
        }
        let limit = tail::tail_limit(x)?.limit;
        let n_star = tail::convergence_exponent(x)?;
        let values = tail::diagonal_series(&t, x)?;
        let bad = values
            .iter()
            .find(|v| v.exponent >= n_star && v.count != limit);
        let name = if n_star <= top {
            format!("diagonal {x} equals its limit {limit} from row 2^{n_star}")
        } else {
            format!("diagonal {x} limit {limit} (reached at 2^{n_star}, beyond built rows)")
        };
        check(
            name,
            bad.map_or(Ok(()), |v| {
                Err(format!("row 2^{} holds {}", v.exponent, v.count))
            }),
        );
    }

    Ok((report, failures))
}
