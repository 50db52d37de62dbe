//! Naive reference implementations used to cross-check the sieve and the
//! tail enumerator. Shares no code with either.

use crate::error::{Error, Result};
use crate::sieve::Dimension;
use crate::triangle::DistributionRow;

/// Largest exponent [`row_by_bruteforce`] accepts.
pub const BRUTEFORCE_MAX_EXPONENT: u32 = 24;

/// Prime factors of `m` with multiplicity, by trial division.
pub fn omega_trial_division(m: u64) -> Result<Dimension> {
    if m == 0 {
        return Err(Error::usage("dimension of 0 is undefined"));
    }
    let mut rest = m;
    let mut count = 0;
    while rest.is_multiple_of(2) {
        rest /= 2;
        count += 1;
    }
    let mut d = 3u64;
    while d * d <= rest {
        while rest.is_multiple_of(d) {
            rest /= d;
            count += 1;
        }
        d += 2;
    }
    if rest > 1 {
        count += 1;
    }
    Ok(Dimension(count))
}

/// Histogram of [`omega_trial_division`] over `[1, 2^n]`.
pub fn row_by_bruteforce(n: u32) -> Result<DistributionRow> {
    if n > BRUTEFORCE_MAX_EXPONENT {
        return Err(Error::usage(format!(
            "brute-force rows are capped at 2^{BRUTEFORCE_MAX_EXPONENT}; use the sieve for 2^{n}"
        )));
    }
    let mut counts = vec![0u64; n as usize + 1];
    for m in 1..=(1u64 << n) {
        counts[omega_trial_division(m)?.value() as usize] += 1;
    }
    DistributionRow::new(n, counts)
}
