//! Segmented sieve computing the dimension (prime factors counted with
//! multiplicity) of every integer in a range.
//!
//! Each segment `[lo, hi]` is processed independently: every prime power
//! `p^k <= hi` with `p <= sqrt(hi)` bumps the dimension of its multiples and
//! records `p` in a running product of the factors found so far. An integer
//! whose product falls short of itself has a single leftover cofactor, which
//! must be a prime larger than `sqrt(hi)`, so it gains exactly one more.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::triangle::DistributionRow;

pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 22;
pub const MIN_SEGMENT_SIZE: u64 = 1 << 10;

/// Largest supported space exponent. Row sums are `2^n` and must fit in a `u64`.
pub const MAX_EXPONENT: u32 = 63;

/// Number of prime factors of an integer, counted with multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dimension(pub u32);

impl Dimension {
    pub fn value(self) -> u32 {
        self.0
    }
}

/// Primes up to a known limit, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasePrimes {
    limit: u64,
    primes: Vec<u64>,
}

impl BasePrimes {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// True when every prime `<= sqrt(hi)` is present.
    pub fn covers(&self, hi: u64) -> bool {
        self.limit >= hi.isqrt()
    }
}

/// All primes in `[2, limit]` by the sieve of Eratosthenes.
pub fn base_primes(limit: u64) -> Result<BasePrimes> {
    if limit < 2 {
        return Err(Error::usage(format!(
            "base prime limit must be at least 2, got {limit}"
        )));
    }
    let size = usize::try_from(limit + 1)
        .map_err(|_| Error::usage(format!("base prime limit {limit} exceeds address space")))?;
    let mut composite = Vec::new();
    composite
        .try_reserve_exact(size)
        .map_err(|e| Error::Resource {
            exponent: bit_length(limit),
            reason: format!("base prime table of {size} entries: {e}"),
        })?;
    composite.resize(size, false);

    let mut p = 2usize;
    while p * p < size {
        if !composite[p] {
            for m in (p * p..size).step_by(p) {
                composite[m] = true;
            }
        }
        p += 1;
    }
    let primes = (2..size)
        .filter(|&i| !composite[i])
        .map(|i| i as u64)
        .collect();
    Ok(BasePrimes { limit, primes })
}

/// Per-dimension tallies over the closed range `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub lo: u64,
    pub hi: u64,
    /// `counts[d]` is the number of integers in the range with dimension `d`.
    /// Its length is `floor(log2(hi)) + 1`.
    pub counts: Vec<u64>,
}

impl Segment {
    pub fn len(&self) -> u64 {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Joins this segment with the one immediately following it.
    pub fn merge(mut self, next: &Segment) -> Result<Segment> {
        if self.hi.checked_add(1) != Some(next.lo) {
            return Err(Error::usage(format!(
                "segments [{}, {}] and [{}, {}] are not adjacent",
                self.lo, self.hi, next.lo, next.hi
            )));
        }
        add_counts(&mut self.counts, &next.counts);
        self.hi = next.hi;
        Ok(self)
    }
}

pub(crate) fn add_counts(acc: &mut Vec<u64>, other: &[u64]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), 0);
    }
    for (a, &b) in acc.iter_mut().zip(other) {
        *a = a.checked_add(b).expect("dimension tally overflowed u64");
    }
}

/// Number of bits needed to represent `x`, i.e. the smallest `n` with `x < 2^n`.
fn bit_length(x: u64) -> u32 {
    u64::BITS - x.leading_zeros()
}

fn floor_log2(x: u64) -> usize {
    (bit_length(x) - 1) as usize
}

fn check_range(lo: u64, hi: u64, primes: &BasePrimes) -> Result<()> {
    if lo == 0 || lo > hi {
        return Err(Error::usage(format!(
            "segment bounds must satisfy 1 <= lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if !primes.covers(hi) {
        return Err(Error::usage(format!(
            "base primes up to {} do not cover sqrt({hi}) = {}",
            primes.limit,
            hi.isqrt()
        )));
    }
    Ok(())
}

fn try_filled<T: Clone>(value: T, len: usize, hi: u64) -> Result<Vec<T>> {
    let mut v = Vec::new();
    v.try_reserve_exact(len).map_err(|e| Error::Resource {
        exponent: bit_length(hi - 1),
        reason: format!("segment buffer of {len} entries: {e}"),
    })?;
    v.resize(len, value);
    Ok(v)
}

/// Integers handled per inner pass, sized so both working arrays stay in L2.
const BLOCK: usize = 1 << 15;

/// Dimension of every integer in `[lo, hi]`, indexed from `lo`.
pub fn segment_dimensions(lo: u64, hi: u64, primes: &BasePrimes) -> Result<Vec<u8>> {
    check_range(lo, hi, primes)?;
    let len = usize::try_from(hi - lo + 1)
        .map_err(|_| Error::usage(format!("segment [{lo}, {hi}] exceeds address space")))?;
    let mut dims = try_filled(0u8, len, hi)?;
    let mut found = try_filled(1u64, BLOCK.min(len), hi)?;
    let sieving = &primes.as_slice()[..primes.as_slice().partition_point(|&p| p <= hi.isqrt())];

    for (b, block) in dims.chunks_mut(BLOCK).enumerate() {
        let block_lo = lo + (b * BLOCK) as u64;
        let block_hi = block_lo + block.len() as u64 - 1;
        let found = &mut found[..block.len()];
        found.fill(1);
        sieve_block(block_lo, block_hi, sieving, block, found);
    }
    Ok(dims)
}

fn sieve_block(lo: u64, hi: u64, primes: &[u64], dims: &mut [u8], found: &mut [u64]) {
    let len = dims.len();
    for &p in primes {
        let mut pk = p;
        loop {
            let start = (lo.div_ceil(pk) * pk - lo) as usize;
            if start >= len {
                // no multiple of p^k here, so none of any higher power
                break;
            }
            for i in (start..len).step_by(pk as usize) {
                dims[i] += 1;
                found[i] *= p;
            }
            match pk.checked_mul(p) {
                Some(next) if next <= hi => pk = next,
                _ => break,
            }
        }
    }
    for (i, (d, &f)) in dims.iter_mut().zip(found.iter()).enumerate() {
        if f != lo + i as u64 {
            *d += 1;
        }
    }
}

/// Histogram of dimensions over `[lo, hi]`.
pub fn sieve_segment(lo: u64, hi: u64, primes: &BasePrimes) -> Result<Segment> {
    let dims = segment_dimensions(lo, hi, primes)?;
    let mut counts = vec![0u64; floor_log2(hi) + 1];
    for d in dims {
        counts[d as usize] += 1;
    }
    Ok(Segment { lo, hi, counts })
}

/// Segmentation and parallelism settings. Neither affects the counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    segment_size: u64,
    threads: Option<usize>,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            segment_size: DEFAULT_SEGMENT_SIZE,
            threads: None,
        }
    }
}

impl SieveConfig {
    /// `threads = None` uses rayon's global pool.
    pub fn new(segment_size: u64, threads: Option<usize>) -> Result<Self> {
        if segment_size < MIN_SEGMENT_SIZE {
            return Err(Error::usage(format!(
                "segment size must be at least {MIN_SEGMENT_SIZE}, got {segment_size}"
            )));
        }
        if threads == Some(0) {
            return Err(Error::usage("thread count must be positive"));
        }
        Ok(SieveConfig {
            segment_size,
            threads,
        })
    }

    pub fn segment_size(&self) -> u64 {
        self.segment_size
    }

    pub fn threads(&self) -> Option<usize> {
        self.threads
    }

    /// Runs `f` inside a pool sized per this config.
    pub(crate) fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(f()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Resource {
                        exponent: 0,
                        reason: format!("thread pool of {n} workers: {e}"),
                    })?;
                Ok(pool.install(f))
            }
        }
    }
}

/// Histogram of dimensions over `[lo, hi]`, split into segments that are
/// sieved in parallel and summed in segment order.
pub(crate) fn count_range(
    lo: u64,
    hi: u64,
    primes: &BasePrimes,
    segment_size: u64,
) -> Result<Vec<u64>> {
    let bounds: Vec<(u64, u64)> = {
        let mut v = Vec::new();
        let mut start = lo;
        loop {
            let end = start.saturating_add(segment_size - 1).min(hi);
            v.push((start, end));
            if end == hi {
                break;
            }
            start = end + 1;
        }
        v
    };
    let segments = bounds
        .into_par_iter()
        .map(|(a, b)| sieve_segment(a, b, primes))
        .collect::<Result<Vec<_>>>()?;

    let mut counts = vec![0u64; floor_log2(hi) + 1];
    for seg in &segments {
        add_counts(&mut counts, &seg.counts);
    }
    Ok(counts)
}

fn check_exponent(n: u32) -> Result<()> {
    if n > MAX_EXPONENT {
        return Err(Error::usage(format!(
            "space exponent must be at most {MAX_EXPONENT}, got {n}"
        )));
    }
    Ok(())
}

/// Base primes sufficient for every segment inside `[1, 2^n]`.
pub(crate) fn base_primes_for_exponent(n: u32) -> Result<BasePrimes> {
    check_exponent(n)?;
    base_primes((1u64 << n).isqrt().max(2))
}

/// Dimensions distribution of the space `[1, 2^n]`, sieved in one pass.
pub fn count_dimensions(n: u32, config: &SieveConfig) -> Result<DistributionRow> {
    check_exponent(n)?;
    let primes = base_primes_for_exponent(n)?;
    let hi = 1u64 << n;
    let counts = config.install(|| count_range(1, hi, &primes, config.segment_size))??;
    DistributionRow::new(n, counts)
}
