//! Distribution of the integers in `[1, 2^n]` by their number of prime
//! factors counted with multiplicity (their "dimension").
//!
//! Row `n` of the triangle built here holds, for each `d`, how many
//! `m <= 2^n` have exactly `d` prime factors. Rows are produced by a
//! segmented sieve and extended one power of two at a time. On top of the
//! triangle sit the tail analysis of its diagonals, per-column log growth,
//! maximum-column tracking, and entropy against Pascal's triangle.
//!
//! ```
//! use omega_triangle::{build_triangle, SieveConfig};
//!
//! let t = build_triangle(5, &SieveConfig::default()).unwrap();
//! assert_eq!(t.row(5).unwrap().counts(), &[1, 11, 10, 7, 2, 1]);
//! ```

pub mod analytics;
pub mod cache;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod sieve;
pub mod tail;
pub mod triangle;

pub use error::{Error, Result};
pub use sieve::{base_primes, count_dimensions, sieve_segment, Dimension, SieveConfig};
pub use triangle::{
    build_triangle, export_triangle, import_triangle, DistributionRow, Format, Triangle,
};
