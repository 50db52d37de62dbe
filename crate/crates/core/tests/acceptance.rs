//! Acceptance criteria. Runs every criterion, prints one PASS/FAIL line for
//! each, and exits non-zero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use omega_triangle::analytics::{column_diffs, entropy_report, max_column, max_column_transitions};
use omega_triangle::oracle::row_by_bruteforce;
use omega_triangle::sieve::count_dimensions;
use omega_triangle::tail::{convergence_exponent, diagonal_series, tail_limit};
use omega_triangle::{build_triangle, import_triangle, Format, SieveConfig, Triangle};

const BIN: &str = env!("CARGO_BIN_EXE_omega-triangle");
const TABLE1: &str = include_str!("fixtures/table1.tsv");
const TABLE2: &str = include_str!("fixtures/table2.tsv");

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(BIN)
        .args(args)
        .output()
        .map_err(|e| format!("spawn {BIN}: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} exited with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn build(n: u32) -> Result<Triangle, String> {
    build_triangle(n, &SieveConfig::default()).map_err(|e| e.to_string())
}

fn table1() -> Triangle {
    import_triangle(TABLE1, Format::Tsv).expect("fixture is a valid triangle")
}

fn table1_bit_exact() -> Outcome {
    let out = cli(&[
        "triangle",
        "--max-exp",
        "23",
        "--format",
        "tsv",
        "--no-cache",
    ])?;
    let text = String::from_utf8(out).map_err(|e| e.to_string())?;
    if text != TABLE1 {
        let line = text
            .lines()
            .zip(TABLE1.lines())
            .position(|(a, b)| a != b)
            .map_or("length".to_string(), |i| format!("line {}", i + 1));
        return Err(format!("output differs from fixture at {line}"));
    }
    let t = import_triangle(&text, Format::Tsv).map_err(|e| e.to_string())?;
    let r23 = t.row(23).unwrap().counts();
    ensure(r23[1] == 564163, || {
        format!("row 2^23 column 1 = {}", r23[1])
    })?;
    let r14 = t.row(14).unwrap().counts();
    ensure(
        r14 == [
            1, 1900, 4192, 4214, 2866, 1643, 831, 406, 185, 84, 37, 15, 7, 2, 1,
        ],
        || format!("row 2^14 = {r14:?}"),
    )?;
    Ok("24 rows identical to fixture".into())
}

fn row_sums_to_26() -> Outcome {
    let t = build(26)?;
    for row in t.rows() {
        let sum: u64 = row.counts().iter().sum();
        ensure(sum == 1u64 << row.exponent(), || {
            format!("row 2^{} sums to {sum}", row.exponent())
        })?;
    }
    Ok(format!("rows 0..=26, row 2^26 sums to {}", 1u64 << 26))
}

fn oracle_to_16() -> Outcome {
    let cfg = SieveConfig::default();
    let t = build(16)?;
    for n in 0..=16 {
        let brute = row_by_bruteforce(n).map_err(|e| e.to_string())?;
        let sieve = count_dimensions(n, &cfg).map_err(|e| e.to_string())?;
        ensure(sieve == brute, || format!("single-pass row 2^{n} differs"))?;
        ensure(t.rows()[n as usize] == brute, || {
            format!("incremental row 2^{n} differs")
        })?;
    }
    Ok("rows 0..=16 equal trial division".into())
}

fn tail_limits() -> Outcome {
    let expected = [1u64, 2, 7, 15, 37, 84, 187, 421, 914];
    let table = table1();
    for (x, &want) in expected.iter().enumerate() {
        let x = x as u32;
        let got = tail_limit(x).map_err(|e| e.to_string())?.limit;
        ensure(got == want, || {
            format!("tail_limit({x}) = {got}, expected {want}")
        })?;
        let n_star = convergence_exponent(x).map_err(|e| e.to_string())?;
        let stable: Vec<u64> = diagonal_series(&table, x)
            .map_err(|e| e.to_string())?
            .into_iter()
            .filter(|v| v.exponent >= n_star)
            .map(|v| v.count)
            .collect();
        ensure(
            !stable.is_empty() && stable.iter().all(|&c| c == want),
            || format!("diagonal {x} from 2^{n_star} is {stable:?}, limit {want}"),
        )?;
    }
    let n2 = convergence_exponent(2).map_err(|e| e.to_string())?;
    ensure(n2 == 5, || format!("convergence_exponent(2) = {n2}"))?;
    Ok("limits 1 2 7 15 37 84 187 421 914; n*(2) = 5".into())
}

fn diagonal_openings() -> Outcome {
    let t = build(12)?;
    let cases: [(u32, &[u64]); 3] = [
        (2, &[4, 6, 7, 7]),
        (3, &[6, 10, 13, 14, 15, 15]),
        (4, &[11, 22, 30, 34, 36, 37, 37]),
    ];
    for (x, want) in cases {
        let got: Vec<u64> = diagonal_series(&t, x)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|v| v.count)
            .take(want.len())
            .collect();
        ensure(got == want, || format!("x={x}: {got:?}"))?;
    }
    Ok("x=2,3,4 openings match".into())
}

/// Rounds to the number of decimals the printed value carries (at most 6),
/// then compares within 1e-6.
fn matches_printed(value: f64, printed: &str) -> bool {
    let decimals = printed.split('.').nth(1).map_or(0, str::len).min(6) as i32;
    let scale = 10f64.powi(decimals);
    let rounded = (value * scale).round() / scale;
    let expected: f64 = printed.parse().unwrap();
    (rounded - expected).abs() <= 1e-6 + 1e-12
}

fn table2_reproduction() -> Outcome {
    let t = build(23)?;
    let mut checked = 0;
    for line in TABLE2.lines().skip(1) {
        let f: Vec<&str> = line.split('\t').collect();
        let (column, n): (u32, u32) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let series = column_diffs(&t, column).map_err(|e| e.to_string())?;
        let entry = series
            .entries
            .iter()
            .find(|e| e.exponent == n)
            .ok_or_else(|| format!("column {column} has no entry at 2^{n}"))?;
        if !f[2].is_empty() {
            ensure(matches_printed(entry.ln_count, f[2]), || {
                format!(
                    "ln at column {column}, 2^{n}: {:.6} vs {}",
                    entry.ln_count, f[2]
                )
            })?;
            checked += 1;
        }
        if f.len() > 3 && !f[3].is_empty() {
            let diff = entry
                .diff
                .ok_or_else(|| format!("no diff at column {column}, 2^{n}"))?;
            ensure(matches_printed(diff, f[3]), || {
                format!("diff at column {column}, 2^{n}: {diff:.6} vs {}", f[3])
            })?;
            checked += 1;
        }
    }
    let anchor = |column: u32, n: u32| -> Result<(String, String), String> {
        let s = column_diffs(&t, column).map_err(|e| e.to_string())?;
        let e = s.entries.iter().find(|e| e.exponent == n).unwrap();
        Ok((
            format!("{:.6}", e.ln_count),
            e.diff.map(|d| format!("{d:.6}")).unwrap_or_default(),
        ))
    };
    let (ln11, d5) = anchor(1, 5)?;
    ensure(ln11 == "2.397895" && d5 == "0.606136", || {
        format!("(1, 2^5) = {ln11}, {d5}")
    })?;
    let (ln421, _) = anchor(13, 20)?;
    ensure(ln421 == "6.042633", || format!("(13, 2^20) = {ln421}"))?;
    let (ln15, _) = anchor(10, 13)?;
    ensure(ln15 == "2.708050", || format!("(10, 2^13) = {ln15}"))?;
    Ok(format!("{checked} printed values reproduced"))
}

fn max_column_shifts() -> Outcome {
    let t = build(23)?;
    let got: Vec<(u32, usize)> = max_column_transitions(&t)
        .iter()
        .map(|tr| (tr.exponent, tr.column))
        .collect();
    ensure(got == [(6, 2), (14, 3)], || format!("transitions {got:?}"))?;
    let four = max_column(t.row(4).unwrap());
    ensure(four.tied && four.index == 1, || {
        format!("row 2^4: {four:?}")
    })?;
    Ok("6 -> 2, 14 -> 3; tie at 2^4 flagged".into())
}

fn entropy_properties() -> Outcome {
    let t = build(23)?;
    let report = entropy_report(&t);
    for w in report.entries.windows(2) {
        let (prev, cur) = (w[0], w[1]);
        ensure(cur.s_dim > prev.s_dim, || {
            format!(
                "s_dim(2^{}) = {} not above {}",
                cur.exponent, cur.s_dim, prev.s_dim
            )
        })?;
    }
    for e in &report.entries {
        if e.exponent >= 4 {
            ensure(e.s_dim < e.s_pascal, || {
                format!(
                    "2^{}: s_dim {} >= s_pascal {}",
                    e.exponent, e.s_dim, e.s_pascal
                )
            })?;
        }
        let bound = ((e.exponent + 1) as f64).ln();
        ensure(e.s_dim <= bound, || {
            format!("2^{}: s_dim {} > ln(n+1)", e.exponent, e.s_dim)
        })?;
    }
    let last = report.entries.last().unwrap();
    Ok(format!(
        "s_dim(2^23) = {:.6}, s_pascal(2^23) = {:.6}",
        last.s_dim, last.s_pascal
    ))
}

fn scale_to_30() -> Outcome {
    let out = cli(&[
        "triangle",
        "--max-exp",
        "30",
        "--format",
        "json",
        "--no-cache",
    ])?;
    let text = String::from_utf8(out).map_err(|e| e.to_string())?;
    let t = import_triangle(&text, Format::Json).map_err(|e| e.to_string())?;
    ensure(t.max_exponent() == 30, || {
        format!("max exponent {}", t.max_exponent())
    })?;
    for row in t.rows() {
        let sum: u64 = row.counts().iter().sum();
        ensure(sum == 1u64 << row.exponent(), || {
            format!("row 2^{} sums to {sum}", row.exponent())
        })?;
    }
    let transitions: Vec<String> = max_column_transitions(&t)
        .iter()
        .map(|tr| format!("{}->{}", tr.exponent, tr.column))
        .collect();
    Ok(format!(
        "row 2^30 sums to 2^30; transitions to N=30: {}",
        transitions.join(", ")
    ))
}

fn thread_determinism() -> Outcome {
    let runs = ["1", "2", "8"]
        .iter()
        .map(|t| {
            cli(&[
                "triangle",
                "--max-exp",
                "23",
                "--format",
                "tsv",
                "--no-cache",
                "--threads",
                t,
                "--segment-size",
                "65536",
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    ensure(runs.iter().all(|r| r == &runs[0]), || {
        "outputs differ across thread counts".into()
    })?;
    ensure(runs[0] == TABLE1.as_bytes(), || {
        "output differs from fixture".into()
    })?;
    Ok("1, 2 and 8 threads byte-identical".into())
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    check: fn() -> Outcome,
}

fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion {
            id: 1,
            name: "triangle to 2^23 matches transcribed table",
            limit: secs(10),
            check: table1_bit_exact,
        },
        Criterion {
            id: 2,
            name: "row sums equal 2^n for n <= 26",
            limit: secs(60),
            check: row_sums_to_26,
        },
        Criterion {
            id: 3,
            name: "sieve equals trial division for n <= 16",
            limit: secs(120),
            check: oracle_to_16,
        },
        Criterion {
            id: 4,
            name: "tail limits for x = 0..8 and n*(2) = 5",
            limit: secs(1),
            check: tail_limits,
        },
        Criterion {
            id: 5,
            name: "diagonal openings for x = 2, 3, 4",
            limit: secs(1),
            check: diagonal_openings,
        },
        Criterion {
            id: 6,
            name: "log counts and differences reproduce printed table",
            limit: secs(5),
            check: table2_reproduction,
        },
        Criterion {
            id: 7,
            name: "max-column transitions to 2^23",
            limit: secs(1),
            check: max_column_shifts,
        },
        Criterion {
            id: 8,
            name: "entropy monotone, below Pascal, bounded",
            limit: secs(1),
            check: entropy_properties,
        },
        Criterion {
            id: 9,
            name: "triangle to 2^30 within 10 minutes",
            limit: secs(600),
            check: scale_to_30,
        },
        Criterion {
            id: 10,
            name: "output identical across 1, 2, 8 threads",
            limit: Duration::MAX,
            check: thread_determinism,
        },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.check)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => Err(format!(
                "{detail}; took {:.2?}, limit {:?}",
                elapsed, c.limit
            )),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {} ({:.2?}): {detail}", c.id, c.name, elapsed),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:>2}] {} ({:.2?}): {why}", c.id, c.name, elapsed);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
