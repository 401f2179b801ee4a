//! Weight estimation locked to a hidden-shift key.
//!
//! An instance pairs an N-bit string `X` (the estimation target, `N = 2^n`)
//! with a hidden-shift function whose n-bit secret, read as an integer, is
//! promised to lie within `0.09 * N` of the weight of `X`. Any output
//! within `N / 10` of the weight is acceptable, so the secret value is one
//! acceptable answer with room to spare.
//!
//! The point of the pairing: recovering the secret takes O(n) quantum
//! queries and lands on the same value every time, giving a canonical
//! answer; a sampling estimator gets within the window cheaply but has to
//! spread its output to avoid committing to a wrong exact value, so its
//! distribution has no heavy mode. The constructions here exhibit both
//! sides.

use rand::Rng;
use thiserror::Error;

use crate::oracle::{BitString, CountedOracle, FunctionTable};
use crate::problems::hamming::hamming_estimate;
use crate::simon::{random_instance, solve_secret, SimonError, SimonInstance};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimonHammingError {
    #[error("string length {len} does not match 2^{width}")]
    WrongLength { len: usize, width: u32 },
    #[error("weight {weight} vs secret value {secret}: outside 9% of N = {n}")]
    PromiseViolation { weight: usize, secret: u64, n: usize },
    #[error("no secret value lies within 9% of weight {weight} for N = {n}")]
    NoCompatibleSecret { weight: usize, n: usize },
    #[error(transparent)]
    Simon(#[from] SimonError),
}

/// Default sample-count multiplier for [`sh_classical_randomized`]: the
/// estimator draws `ceil(c * log2 N)` samples. Desk-scale default; the
/// estimator's exact-hit probability grows with `c` (see the module tests).
pub const SH_SAMPLE_FACTOR: f64 = 1e4;

/// The promise pair: a hidden-shift instance of width n and an N-bit
/// string with `|weight(X) - value(s)| <= 0.09 * N`, `N = 2^n`.
#[derive(Debug, Clone)]
pub struct SimonHammingInstance {
    simon: SimonInstance,
    x: BitString,
}

impl SimonHammingInstance {
    pub fn new(simon: SimonInstance, x: BitString) -> Result<Self, SimonHammingError> {
        let n = 1usize << simon.width();
        if x.len() != n {
            return Err(SimonHammingError::WrongLength {
                len: x.len(),
                width: simon.width(),
            });
        }
        let weight = x.weight();
        let secret = simon.secret();
        // exact arithmetic: |weight - secret| <= 9N/100
        let diff = (weight as i128 - secret as i128).abs();
        if diff * 100 > 9 * n as i128 {
            return Err(SimonHammingError::PromiseViolation { weight, secret, n });
        }
        Ok(Self { simon, x })
    }

    #[must_use]
    pub fn width(&self) -> u32 {
        self.simon.width()
    }

    /// N, the length of the estimation target.
    #[must_use]
    pub fn domain_size(&self) -> usize {
        self.x.len()
    }

    /// The secret as an integer: the canonical estimate.
    #[must_use]
    pub fn secret_value(&self) -> u64 {
        self.simon.secret()
    }

    #[must_use]
    pub fn x(&self) -> &BitString {
        &self.x
    }

    #[must_use]
    pub fn simon(&self) -> &SimonInstance {
        &self.simon
    }

    /// Is `t` an acceptable estimate for this instance's string?
    #[must_use]
    pub fn valid_output(&self, t: u64) -> bool {
        let n = self.domain_size() as i128;
        (self.x.weight() as i128 - t as i128).abs() * 10 <= n
    }

    /// Fresh paired oracle over (function, string).
    #[must_use]
    pub fn oracle(&self) -> SimonHammingOracle {
        SimonHammingOracle {
            f: CountedOracle::new(self.simon.table().clone()),
            x: CountedOracle::new(self.x.clone()),
        }
    }
}

/// Counted access to both halves of an instance; totals are summed across
/// the two underlying oracles.
#[derive(Debug)]
pub struct SimonHammingOracle {
    f: CountedOracle<FunctionTable>,
    x: CountedOracle<BitString>,
}

impl SimonHammingOracle {
    #[must_use]
    pub fn f(&self) -> &CountedOracle<FunctionTable> {
        &self.f
    }

    #[must_use]
    pub fn x(&self) -> &CountedOracle<BitString> {
        &self.x
    }

    #[must_use]
    pub fn classical_queries(&self) -> u64 {
        self.f.classical_queries() + self.x.classical_queries()
    }

    #[must_use]
    pub fn quantum_queries(&self) -> u64 {
        self.f.quantum_queries() + self.x.quantum_queries()
    }

    #[must_use]
    pub fn total_queries(&self) -> u64 {
        self.classical_queries() + self.quantum_queries()
    }
}

/// Canonical estimator: recover the hidden shift and output its value.
/// O(log N) queries, same answer on every successful run, and by the
/// construction promise the answer is within N/10 of the weight.
pub fn sh_quantum_psd(
    oracle: &SimonHammingOracle,
    rng: &mut impl Rng,
) -> Result<u64, SimonError> {
    Ok(solve_secret(&oracle.f, rng)?.secret)
}

/// Sampling estimator: estimate the weight from `ceil(c * log2 N)` samples,
/// then output a uniform integer from the window `[t_hat - 0.095N,
/// t_hat + 0.095N]`, endpoints pushed outward to integers and clamped to
/// `[0, N]`.
///
/// Any output is within `0.095N + |t_hat - weight|` of the true weight, so
/// the answer is acceptable whenever the estimate is within `0.005N`; the
/// outward spread keeps every single value's probability near `1/(0.19N)`.
pub fn sh_classical_randomized(
    oracle: &SimonHammingOracle,
    sample_factor: f64,
    rng: &mut impl Rng,
) -> u64 {
    assert!(sample_factor >= 1.0, "sample factor below 1");
    let n = oracle.x.len();
    let samples = (sample_factor * (n as f64).log2()).ceil() as u64;
    let t_hat = hamming_estimate(&oracle.x, samples, rng) as i128;
    // 0.095 * N = 19N/200 in exact arithmetic; floor the left endpoint,
    // ceil the right, so every integer of the real interval is included
    let n_i = n as i128;
    let lo = (200 * t_hat - 19 * n_i).div_euclid(200).max(0);
    let hi = ceil_div(200 * t_hat + 19 * n_i, 200).min(n_i);
    rng.gen_range(lo..=hi) as u64
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -((-a).div_euclid(b))
}

/// Generate an instance around `target_weight`: the secret value is drawn
/// uniformly from the integers within `0.09N` of the target (error if that
/// window misses `[0, N-1]` entirely), the string has exactly the target
/// weight, and the function is a uniform instance hiding the secret.
pub fn random_sh_instance(
    n: u32,
    target_weight: usize,
    rng: &mut impl Rng,
) -> Result<SimonHammingInstance, SimonHammingError> {
    let size = 1usize << n;
    assert!(target_weight <= size, "weight exceeds string length");
    let tw = target_weight as i128;
    let n_i = size as i128;
    let lo = ceil_div(100 * tw - 9 * n_i, 100).max(0);
    let hi = (100 * tw + 9 * n_i).div_euclid(100).min(n_i - 1);
    if lo > hi {
        return Err(SimonHammingError::NoCompatibleSecret {
            weight: target_weight,
            n: size,
        });
    }
    let secret = rng.gen_range(lo..=hi) as u64;
    let x = BitString::random_with_weight(size, target_weight, rng);
    let simon = random_instance(n, secret, rng);
    SimonHammingInstance::new(simon, x)
}
