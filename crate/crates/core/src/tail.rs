//! Diagonals of the triangle and their eventual constant values.
//!
//! The diagonal at offset `x` reads column `n - x` of row `n`. An integer in
//! `[1, 2^n]` with dimension `n - x` factors as `2^(n-x-j) * q` with `q` odd
//! and of dimension `j`; the bound `m <= 2^n` becomes `q <= 2^(x+j)`, which
//! does not depend on `n`. Once `n - x` reaches the largest such `j`, every
//! odd part is available and the diagonal stops changing.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sieve::base_primes;
use crate::triangle::Triangle;

/// Largest offset accepted by [`tail_limit`]. Keeps every bound `2^(x+j)`
/// inside a `u64` and the prime table at 2^24 entries.
pub const MAX_TAIL_OFFSET: u32 = 23;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiagonalValue {
    pub exponent: u32,
    pub count: u64,
}

/// An odd part `q` of dimension `j` that contributes one integer to every
/// row from `2^(x+j)` on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Witness {
    pub j: u32,
    pub q: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TailLimit {
    pub limit: u64,
    /// Sorted by `j`, then `q`.
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TailSeries {
    pub offset: u32,
    pub values: Vec<DiagonalValue>,
    pub limit: u64,
    pub convergence_exponent: u32,
    pub witnesses: Vec<Witness>,
}

/// Entries `rows[n][n - x]` for `n` from `x + 1` to the triangle's last row.
pub fn diagonal_series(t: &Triangle, x: u32) -> Result<Vec<DiagonalValue>> {
    let top = t.max_exponent();
    if x >= top {
        return Err(Error::usage(format!(
            "diagonal offset must be below the maximum exponent {top}, got {x}"
        )));
    }
    Ok(t.rows()[x as usize + 1..]
        .iter()
        .map(|row| DiagonalValue {
            exponent: row.exponent(),
            count: row.get((row.exponent() - x) as usize),
        })
        .collect())
}

fn check_offset(x: u32) -> Result<()> {
    if x > MAX_TAIL_OFFSET {
        return Err(Error::usage(format!(
            "tail offset must be at most {MAX_TAIL_OFFSET}, got {x}"
        )));
    }
    Ok(())
}

/// Largest `j` with `3^j <= 2^(x+j)`: the most odd prime factors any
/// witness can carry.
fn max_odd_dimension(x: u32) -> u32 {
    let mut j = 0u32;
    let mut pow3: u128 = 1;
    loop {
        let next = pow3 * 3;
        if next > 1u128 << (x + j + 1) {
            return j;
        }
        pow3 = next;
        j += 1;
    }
}

/// Pushes every product of exactly `remaining` primes from `odd_primes[start..]`
/// (non-decreasing, so each multiset once) times `product` that stays within `bound`.
fn odd_parts(
    odd_primes: &[u64],
    start: usize,
    remaining: u32,
    product: u64,
    bound: u64,
    out: &mut Vec<u64>,
) {
    if remaining == 0 {
        out.push(product);
        return;
    }
    for (i, &p) in odd_primes.iter().enumerate().skip(start) {
        let smallest = (product as u128) * (p as u128).pow(remaining);
        if smallest > bound as u128 {
            break;
        }
        odd_parts(odd_primes, i, remaining - 1, product * p, bound, out);
    }
}

/// Eventual value of the diagonal at offset `x`, with every odd part that
/// contributes to it.
pub fn tail_limit(x: u32) -> Result<TailLimit> {
    check_offset(x)?;
    let primes = base_primes(1u64 << (x + 1))?;
    let odd = &primes.as_slice()[1..];

    let mut witnesses = Vec::new();
    let mut parts = Vec::new();
    for j in 0..=max_odd_dimension(x) {
        parts.clear();
        odd_parts(odd, 0, j, 1, 1u64 << (x + j), &mut parts);
        parts.sort_unstable();
        witnesses.extend(parts.iter().map(|&q| Witness { j, q }));
    }
    Ok(TailLimit {
        limit: witnesses.len() as u64,
        witnesses,
    })
}

/// First exponent from which the diagonal at offset `x` equals its limit.
pub fn convergence_exponent(x: u32) -> Result<u32> {
    check_offset(x)?;
    // 3^j_max is always a witness, so the largest j needs no enumeration.
    Ok((x + max_odd_dimension(x)).max(x + 1))
}

/// Diagonal values from `t` together with the exact limit.
pub fn tail_series(t: &Triangle, x: u32) -> Result<TailSeries> {
    let values = diagonal_series(t, x)?;
    let TailLimit { limit, witnesses } = tail_limit(x)?;
    Ok(TailSeries {
        offset: x,
        values,
        limit,
        convergence_exponent: convergence_exponent(x)?,
        witnesses,
    })
}
