//! Hidden XOR-shift recovery from orthogonal samples.
//!
//! An instance hides a function `f` on `n`-bit labels that is either a
//! permutation (secret `s = 0`) or constant exactly on pairs `{x, x XOR s}`
//! (secret `s != 0`). The quantum circuit H - oracle - H yields, on
//! measurement of the input register, a uniform label orthogonal to `s`;
//! collecting labels until they span an (n-1)-dimensional space pins `s`
//! down to one candidate, and a two-point collision check settles whether
//! the function is a permutation. The classical baseline finds a colliding
//! pair by birthday sampling and needs on the order of `2^(n/2)` queries.
//!
//! Labels are big-endian integer readings of bit strings; `x.s = 0` means
//! even-weight AND of the labels.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::oracle::{CountedOracle, FunctionTable, OracleError};
use crate::qsim::{apply_function_oracle, hadamard_register, measure, StateVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimonError {
    #[error("table is not two-to-one with shift {secret:#b}")]
    PromiseViolation { secret: u64 },
    #[error("rank did not reach n-1 within {samples} samples ({attempts} attempts)")]
    SolveFailed { samples: u64, attempts: u32 },
    #[error("collision search budget of {budget} queries exhausted")]
    CollisionBudget { budget: u64 },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Sample cap per attempt, as a multiple of `n`.
const SAMPLE_CAP_FACTOR: u64 = 10;
/// Whole-procedure retries inside [`solve_secret`].
const SOLVE_ATTEMPTS: u32 = 3;

/// A promise instance: the hidden function together with its secret shift.
///
/// The secret is generator-side data for verification; algorithms access
/// the function only through a [`CountedOracle`] built by [`Self::oracle`].
#[derive(Debug, Clone)]
pub struct SimonInstance {
    table: FunctionTable,
    secret: u64,
}

impl SimonInstance {
    /// Maximum width for which construction checks the promise exhaustively.
    pub const PROMISE_CHECK_WIDTH: u32 = 12;

    /// Wrap a table claimed to hide `secret`. For widths up to
    /// [`Self::PROMISE_CHECK_WIDTH`] the two-to-one (or permutation)
    /// structure is checked exhaustively.
    pub fn new(table: FunctionTable, secret: u64) -> Result<Self, SimonError> {
        let n = table.width();
        assert!(secret < (1u64 << n), "secret must be an n-bit label");
        if n <= Self::PROMISE_CHECK_WIDTH {
            let size = table.domain_size() as u64;
            for x in 0..size {
                for y in 0..size {
                    let collide = table.eval(x) == table.eval(y);
                    let should = x == y || x ^ y == secret;
                    if collide != should {
                        return Err(SimonError::PromiseViolation { secret });
                    }
                }
            }
        }
        Ok(Self { table, secret })
    }

    #[must_use]
    pub fn width(&self) -> u32 {
        self.table.width()
    }

    #[must_use]
    pub fn secret(&self) -> u64 {
        self.secret
    }

    #[must_use]
    pub fn table(&self) -> &FunctionTable {
        &self.table
    }

    /// Fresh counted oracle over the hidden function.
    #[must_use]
    pub fn oracle(&self) -> CountedOracle<FunctionTable> {
        CountedOracle::new(self.table.clone())
    }
}

/// Draw a uniform instance hiding `secret`: a uniform injection from the
/// `{x, x XOR secret}` pairs to labels (a uniform permutation when
/// `secret = 0`).
pub fn random_instance(n: u32, secret: u64, rng: &mut impl Rng) -> SimonInstance {
    assert!(n >= 1 && n <= 20, "width out of simulated range");
    assert!(secret < (1u64 << n));
    let size = 1usize << n;
    let mut images: Vec<u64> = (0..size as u64).collect();
    images.shuffle(rng);
    let mut values = vec![u64::MAX; size];
    let mut next = 0usize;
    for x in 0..size as u64 {
        if values[x as usize] == u64::MAX {
            values[x as usize] = images[next];
            values[(x ^ secret) as usize] = images[next];
            next += 1;
        }
    }
    let table = FunctionTable::new(n, values).expect("constructed in range");
    SimonInstance::new(table, secret).expect("constructed to promise")
}

/// One H - oracle - H round: returns a measured label `y` with `y.s = 0`,
/// uniform over that subspace. One quantum query.
pub fn sample_orthogonal(oracle: &CountedOracle<FunctionTable>, rng: &mut impl Rng) -> u64 {
    let d = oracle.domain_size();
    let mut state = StateVector::basis(&[d, d], &[0, 0]);
    hadamard_register(&mut state, 0).expect("power-of-two register");
    apply_function_oracle(&mut state, oracle).expect("layout fixed above");
    hadamard_register(&mut state, 0).expect("power-of-two register");
    measure(&mut state, 0, rng) as u64
}

/// The pre-measurement distribution of [`sample_orthogonal`]'s outcome;
/// test hook for comparing the circuit against theory.
#[must_use]
pub fn orthogonal_sample_distribution(oracle: &CountedOracle<FunctionTable>) -> Vec<f64> {
    let d = oracle.domain_size();
    let mut state = StateVector::basis(&[d, d], &[0, 0]);
    hadamard_register(&mut state, 0).expect("power-of-two register");
    apply_function_oracle(&mut state, oracle).expect("layout fixed above");
    hadamard_register(&mut state, 0).expect("power-of-two register");
    state.marginal(0)
}

/// Row basis in reduced echelon form over GF(2), for incremental rank
/// tracking of sampled labels.
#[derive(Debug, Clone, Default)]
pub struct Gf2Basis {
    rows: Vec<u64>,
}

impl Gf2Basis {
    #[must_use]
    pub fn new() -> Self {
        Self::default()
    }

    #[must_use]
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Insert a vector; returns true if it increased the rank.
    pub fn insert(&mut self, mut v: u64) -> bool {
        for &r in &self.rows {
            v = v.min(v ^ r);
        }
        if v == 0 {
            return false;
        }
        self.rows.push(v);
        self.rows.sort_unstable_by(|a, b| b.cmp(a));
        // re-reduce to keep rows minimal under each pivot
        let rows = std::mem::take(&mut self.rows);
        for r in rows {
            let mut v = r;
            for &q in &self.rows {
                v = v.min(v ^ q);
            }
            if v != 0 {
                self.rows.push(v);
            }
        }
        self.rows.sort_unstable_by(|a, b| b.cmp(a));
        true
    }

    #[must_use]
    pub fn rows(&self) -> &[u64] {
        &self.rows
    }
}

/// Basis of the nullspace `{v : r.v = 0 for every row r}` of a set of
/// `width`-bit row vectors, by Gaussian elimination over GF(2).
#[must_use]
pub fn gf2_nullspace(rows: &[u64], width: u32) -> Vec<u64> {
    let n = width as usize;
    // reduce rows to echelon form, recording pivot columns (MSB-first)
    let mut echelon: Vec<u64> = Vec::new();
    for &row in rows {
        let mut v = row;
        for &r in &echelon {
            let pivot = 63 - r.leading_zeros();
            if (v >> pivot) & 1 == 1 {
                v ^= r;
            }
        }
        if v != 0 {
            echelon.push(v);
            echelon.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let pivots: Vec<u32> = echelon.iter().map(|r| 63 - r.leading_zeros()).collect();
    let free: Vec<u32> = (0..n as u32).filter(|c| !pivots.contains(c)).collect();
    // one basis vector per free column: set it, back-solve the pivots
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = 1u64 << fc;
        for (&r, &p) in echelon.iter().zip(&pivots).rev() {
            let parity = (r & v).count_ones() & 1;
            if parity == 1 {
                v ^= 1u64 << p;
            }
        }
        basis.push(v);
    }
    basis.sort_unstable();
    basis
}

/// Report from a successful secret recovery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretRecovery {
    pub secret: u64,
    pub quantum_queries: u64,
    pub classical_queries: u64,
}

/// Recover the hidden shift.
///
/// Collects orthogonal samples until their GF(2) rank reaches `n - 1`
/// (capped at 10n samples per attempt, 3 attempts), takes the unique
/// nonzero nullspace vector `v`, and disambiguates with two classical
/// queries: `f(0) = f(v)` certifies `s = v`, otherwise the promise forces
/// `s = 0`. When it returns at all, the answer is correct under the
/// promise; failure to reach rank `n - 1` is a flagged error.
pub fn solve_secret(
    oracle: &CountedOracle<FunctionTable>,
    rng: &mut impl Rng,
) -> Result<SecretRecovery, SimonError> {
    let n = oracle.width();
    let before_q = oracle.quantum_queries();
    let before_c = oracle.classical_queries();
    let cap = SAMPLE_CAP_FACTOR * u64::from(n);
    let mut samples_taken = 0u64;
    for attempt in 1..=SOLVE_ATTEMPTS {
        let mut basis = Gf2Basis::new();
        let mut taken_this_attempt = 0u64;
        while basis.rank() < (n as usize).saturating_sub(1) && taken_this_attempt < cap {
            let y = sample_orthogonal(oracle, rng);
            taken_this_attempt += 1;
            basis.insert(y);
        }
        samples_taken += taken_this_attempt;
        if basis.rank() == (n as usize).saturating_sub(1) {
            let nullspace = gf2_nullspace(basis.rows(), n);
            debug_assert_eq!(nullspace.len(), 1);
            let v = nullspace[0];
            let f0 = oracle.query(0)?;
            let fv = oracle.query(v)?;
            let secret = if f0 == fv { v } else { 0 };
            return Ok(SecretRecovery {
                secret,
                quantum_queries: oracle.quantum_queries() - before_q,
                classical_queries: oracle.classical_queries() - before_c,
            });
        }
        if attempt == SOLVE_ATTEMPTS {
            break;
        }
    }
    Err(SimonError::SolveFailed {
        samples: samples_taken,
        attempts: SOLVE_ATTEMPTS,
    })
}

/// Classical baseline: query uniformly random distinct labels until two of
/// them collide, and return their XOR.
///
/// Under the promise with `s != 0` a collision is guaranteed within
/// `2^(n-1) + 1` distinct queries (the budget); expected usage is on the
/// order of `2^(n/2)`. On a permutation (`s = 0`) the budget runs out and a
/// flagged error is returned.
pub fn classical_collision(
    oracle: &CountedOracle<FunctionTable>,
    rng: &mut impl Rng,
) -> Result<SecretRecovery, SimonError> {
    let size = oracle.domain_size() as u64;
    let budget = size / 2 + 1;
    let before_c = oracle.classical_queries();
    let mut order: Vec<u64> = (0..size).collect();
    order.shuffle(rng);
    let mut seen: std::collections::HashMap<u64, u64> = std::collections::HashMap::new();
    for &x in order.iter().take(budget as usize) {
        let fx = oracle.query(x)?;
        if let Some(&y) = seen.get(&fx) {
            return Ok(SecretRecovery {
                secret: x ^ y,
                quantum_queries: 0,
                classical_queries: oracle.classical_queries() - before_c,
            });
        }
        seen.insert(fx, x);
    }
    Err(SimonError::CollisionBudget { budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::NORM_TOLERANCE;
    use crate::seeds::trial_rng;

    #[test]
    fn instance_generation_respects_the_promise() {
        let mut rng = trial_rng(31, 0, 0);
        // n=1, s=1: f must be constant
        let inst = random_instance(1, 1, &mut rng);
        assert_eq!(inst.table().eval(0), inst.table().eval(1));
        // n=1, s=0: f must be a bijection
        let inst = random_instance(1, 0, &mut rng);
        assert_ne!(inst.table().eval(0), inst.table().eval(1));
        // n=2, s=11b: cosets {00,11} and {01,10}
        let inst = random_instance(2, 3, &mut rng);
        assert_eq!(inst.table().eval(0), inst.table().eval(3));
        assert_eq!(inst.table().eval(1), inst.table().eval(2));
        assert_ne!(inst.table().eval(0), inst.table().eval(1));
    }

    #[test]
    fn promise_checker_rejects_bad_tables() {
        // constant-on-wrong-pairs table for claimed secret 1
        let table = FunctionTable::new(2, vec![0, 0, 1, 2]).unwrap();
        assert!(matches!(
            SimonInstance::new(table, 2),
            Err(SimonError::PromiseViolation { .. })
        ));
        // a valid shift-3 table accepted
        let table = FunctionTable::new(2, vec![1, 2, 2, 1]).unwrap();
        assert!(SimonInstance::new(table, 3).is_ok());
    }

    #[test]
    fn generated_images_are_uniformly_spread() {
        // the image of a shift-s function is a uniform half of the labels;
        // check each label appears as an image at the expected rate
        let n = 3u32;
        let trials = 4000u64;
        let mut appearance = [0u64; 8];
        for t in 0..trials {
            let mut rng = trial_rng(32, 0, t);
            let inst = random_instance(n, 5, &mut rng);
            let mut seen = [false; 8];
            for x in 0..8u64 {
                seen[inst.table().eval(x) as usize] = true;
            }
            for (v, &s) in seen.iter().enumerate() {
                if s {
                    appearance[v] += 1;
                }
            }
        }
        // each label is an image with probability 4/8 = 1/2
        let sigma = (0.5 * 0.5 / trials as f64).sqrt();
        for &cnt in &appearance {
            let freq = cnt as f64 / trials as f64;
            assert!((freq - 0.5).abs() < 4.0 * sigma, "freq {freq}");
        }
    }

    #[test]
    fn orthogonal_distribution_matches_theory() {
        let mut rng = trial_rng(33, 0, 0);
        // n=2, s=11b: outcomes {00, 11} each 1/2
        let inst = random_instance(2, 3, &mut rng);
        let oracle = inst.oracle();
        let probs = orthogonal_sample_distribution(&oracle);
        assert!((probs[0] - 0.5).abs() < NORM_TOLERANCE);
        assert!((probs[3] - 0.5).abs() < NORM_TOLERANCE);
        assert!(probs[1].abs() < NORM_TOLERANCE);
        assert!(probs[2].abs() < NORM_TOLERANCE);
        assert_eq!(oracle.quantum_queries(), 1);

        // s=0: uniform over all labels
        let inst = random_instance(3, 0, &mut rng);
        let probs = orthogonal_sample_distribution(&inst.oracle());
        for &p in &probs {
            assert!((p - 0.125).abs() < NORM_TOLERANCE);
        }

        // general secret: uniform over the orthogonal subspace
        for s in 1..8u64 {
            let inst = random_instance(3, s, &mut rng);
            let probs = orthogonal_sample_distribution(&inst.oracle());
            for (y, &p) in probs.iter().enumerate() {
                let expected = if ((y as u64) & s).count_ones() & 1 == 0 {
                    0.25
                } else {
                    0.0
                };
                assert!((p - expected).abs() < NORM_TOLERANCE, "s={s} y={y}");
            }
        }
    }

    #[test]
    fn sampled_labels_are_orthogonal_to_the_secret() {
        let mut rng = trial_rng(34, 0, 0);
        let inst = random_instance(4, 0b1010, &mut rng);
        let oracle = inst.oracle();
        for _ in 0..200 {
            let y = sample_orthogonal(&oracle, &mut rng);
            assert_eq!((y & inst.secret()).count_ones() & 1, 0);
        }
        assert_eq!(oracle.quantum_queries(), 200);
    }

    #[test]
    fn nullspace_worked_examples() {
        // rows {110, 011} over width 3 -> nullspace {111}
        assert_eq!(gf2_nullspace(&[0b110, 0b011], 3), vec![0b111]);
        // identity rows -> trivial nullspace
        assert_eq!(gf2_nullspace(&[0b100, 0b010, 0b001], 3), Vec::<u64>::new());
        // no rows -> whole space
        assert_eq!(gf2_nullspace(&[], 2).len(), 4 - 2); // basis size = width
    }

    #[test]
    fn nullspace_vectors_annihilate_all_rows() {
        let mut rng = trial_rng(35, 0, 0);
        for _ in 0..300 {
            let width = rand::Rng::gen_range(&mut rng, 1..=10u32);
            let rows: Vec<u64> = (0..rand::Rng::gen_range(&mut rng, 0..=12usize))
                .map(|_| rand::Rng::gen_range(&mut rng, 0..(1u64 << width)))
                .collect();
            let basis = gf2_nullspace(&rows, width);
            for &v in &basis {
                for &r in &rows {
                    assert_eq!((v & r).count_ones() & 1, 0);
                }
            }
            // rank-nullity: |basis| = width - rank(rows)
            let mut b = Gf2Basis::new();
            for &r in &rows {
                b.insert(r);
            }
            assert_eq!(basis.len(), width as usize - b.rank());
        }
    }

    #[test]
    fn incremental_basis_tracks_rank() {
        let mut b = Gf2Basis::new();
        assert!(b.insert(0b101));
        assert!(!b.insert(0b101));
        assert!(b.insert(0b011));
        assert!(!b.insert(0b110)); // dependent
        assert_eq!(b.rank(), 2);
        assert!(!b.insert(0));
    }

    #[test]
    fn solve_recovers_known_secrets() {
        let mut failures = 0u32;
        let trials = 400u64;
        for t in 0..trials {
            let mut rng = trial_rng(36, 0, t);
            let s = rand::Rng::gen_range(&mut rng, 0..16u64);
            let inst = random_instance(4, s, &mut rng);
            let oracle = inst.oracle();
            match solve_secret(&oracle, &mut rng) {
                Ok(rec) => {
                    assert_eq!(rec.secret, s, "wrong secret is never returned");
                    assert_eq!(rec.classical_queries, 2);
                    assert!(rec.quantum_queries <= 3 * SAMPLE_CAP_FACTOR * 4);
                }
                Err(SimonError::SolveFailed { .. }) => failures += 1,
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(failures < trials as u32 / 3, "failures {failures}");
    }

    #[test]
    fn solve_detects_permutations() {
        let mut rng = trial_rng(37, 0, 0);
        let inst = random_instance(5, 0, &mut rng);
        let oracle = inst.oracle();
        let rec = solve_secret(&oracle, &mut rng).unwrap();
        assert_eq!(rec.secret, 0);
    }

    #[test]
    fn solve_mean_queries_stay_linear() {
        // mean quantum queries <= 3n at n = 6
        let trials = 200u64;
        let mut total = 0u64;
        for t in 0..trials {
            let mut rng = trial_rng(38, 0, t);
            let s = rand::Rng::gen_range(&mut rng, 0..64u64);
            let inst = random_instance(6, s, &mut rng);
            let oracle = inst.oracle();
            let rec = solve_secret(&oracle, &mut rng).unwrap();
            assert_eq!(rec.secret, s);
            total += rec.quantum_queries;
        }
        let mean = total as f64 / trials as f64;
        assert!(mean <= 3.0 * 6.0, "mean quantum queries {mean}");
        assert!(mean >= 5.0, "suspiciously few samples: {mean}");
    }

    #[test]
    fn collision_baseline_small_cases() {
        // n=2, s != 0: at most 3 distinct queries can be needed
        for t in 0..200u64 {
            let mut rng = trial_rng(39, 0, t);
            let s = rand::Rng::gen_range(&mut rng, 1..4u64);
            let inst = random_instance(2, s, &mut rng);
            let oracle = inst.oracle();
            let rec = classical_collision(&oracle, &mut rng).unwrap();
            assert_eq!(rec.secret, s);
            assert!(rec.classical_queries <= 3);
        }
    }

    #[test]
    fn collision_baseline_flags_permutations() {
        let mut rng = trial_rng(40, 0, 0);
        let inst = random_instance(4, 0, &mut rng);
        let oracle = inst.oracle();
        assert!(matches!(
            classical_collision(&oracle, &mut rng),
            Err(SimonError::CollisionBudget { .. })
        ));
        assert_eq!(oracle.classical_queries(), 9); // 2^(n-1) + 1
    }

    #[test]
    fn collision_baseline_birthday_cost() {
        // n=10: mean queries within a factor 2 of sqrt(2^10 * pi/2)
        let trials = 1000u64;
        let mut total = 0u64;
        for t in 0..trials {
            let mut rng = trial_rng(41, 0, t);
            let s = rand::Rng::gen_range(&mut rng, 1..1024u64);
            let inst = random_instance(10, s, &mut rng);
            let oracle = inst.oracle();
            let rec = classical_collision(&oracle, &mut rng).unwrap();
            assert_eq!(rec.secret, s);
            total += rec.classical_queries;
        }
        let mean = total as f64 / trials as f64;
        let reference = (1024.0 * std::f64::consts::FRAC_PI_2).sqrt();
        assert!(mean >= reference / 2.0, "mean {mean} vs {reference}");
        assert!(mean <= reference * 2.0, "mean {mean} vs {reference}");
    }
}
