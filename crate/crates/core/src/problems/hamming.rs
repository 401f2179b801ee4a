//! Weight estimation: output an integer within N/10 of the number of ones
//! in a hidden N-bit string.
//!
//! The sampling estimator reads positions uniformly with replacement and
//! rescales the observed fraction. With `s` samples the estimate misses the
//! true weight by more than `eps * N` with probability at most
//! `2 * exp(-2 * s * eps^2)`, so a few hundred samples already pin the
//! weight far inside the N/10 window.

use rand::Rng;

use crate::oracle::{BitString, CountedOracle};

/// Is `t` an acceptable answer for a string of length `n` and weight
/// `weight`? The tolerance is N/10, inclusive, in exact arithmetic.
#[must_use]
pub fn hamming_valid(n: usize, weight: usize, t: u64) -> bool {
    let diff = (weight as i128 - t as i128).abs();
    diff * 10 <= n as i128
}

/// Estimate the weight of the hidden string by sampling `samples` positions
/// uniformly with replacement. Returns `round(N * ones / samples)`. Costs
/// exactly `samples` classical queries.
pub fn hamming_estimate(
    oracle: &CountedOracle<BitString>,
    samples: u64,
    rng: &mut impl Rng,
) -> u64 {
    assert!(samples >= 1, "need at least one sample");
    let n = oracle.len();
    assert!(n >= 1, "empty string has no positions to sample");
    let mut ones = 0u64;
    for _ in 0..samples {
        let pos = rng.gen_range(1..=n);
        ones += u64::from(oracle.query(pos).expect("position in range"));
    }
    (n as f64 * ones as f64 / samples as f64).round() as u64
}
