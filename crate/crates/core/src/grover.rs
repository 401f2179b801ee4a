//! Amplitude amplification over arbitrary index domains.
//!
//! Two entry points. [`grover_known_count`] runs the textbook iteration
//! count for a known number of marked items and verifies its measurement
//! with one classical query. [`grover_search`] handles an unknown marked
//! count with an escalating schedule of randomized iteration caps; it is
//! one-sided (a returned index is always verified marked) and runs within a
//! fixed worst-case query budget of [`SEARCH_BUDGET_CONSTANT`] times the
//! square root of the domain size, for every input.
//!
//! The unknown-count schedule and its guarantee: rounds use caps
//! m = 1, 2, 4, ..., ceil(sqrt(d)), then [`EXTRA_ROUNDS`] more rounds at the
//! final cap; each round runs a uniformly drawn iteration count t < m and
//! verifies one measured candidate. Picking t uniformly below m makes a
//! round succeed with probability at least 1/4 once m >= 1/sin(2*theta)
//! (theta the marked-fraction angle), which the final cap satisfies whenever
//! marked/d <= 3/4; inputs with more than 3/4 marked already succeed in the
//! m = 1 round with probability > 3/4. Failure probability is therefore at
//! most (3/4)^(1 + EXTRA_ROUNDS) < 1/3 for every nonzero restriction.

use rand::Rng;
use thiserror::Error;

use crate::oracle::{BitString, CountedOracle, IndexSet};
use crate::qsim::{apply_diffusion, apply_phase_oracle, measure, StateVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroverError {
    #[error("marked count {marked} invalid for domain size {domain}")]
    BadMarkedCount { marked: usize, domain: usize },
}

/// Result of one search call: the verified index (1-based, inside the
/// domain) if the call succeeded, and the queries this call consumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroverOutcome {
    pub found: Option<usize>,
    pub queries_used: u64,
}

/// Extra rounds at the final iteration cap of [`grover_search`].
pub const EXTRA_ROUNDS: usize = 4;

/// Fixed constant C with `queries_used <= C * sqrt(|I|)` for every
/// [`grover_search`] call on a nonempty domain.
pub const SEARCH_BUDGET_CONSTANT: f64 = 16.0;

/// Iteration count for a known marked count: `round(pi/4 * sqrt(d/k) - 1/2)`.
#[must_use]
pub fn iterations_for_known_count(domain: usize, marked: usize) -> usize {
    assert!(marked >= 1 && marked <= domain);
    let t = std::f64::consts::FRAC_PI_4 * ((domain as f64) / (marked as f64)).sqrt() - 0.5;
    t.round().max(0.0) as usize
}

/// Closed-form success probability after `iters` iterations:
/// `sin^2((2t+1) * asin(sqrt(k/d)))`.
#[must_use]
pub fn success_probability(domain: usize, marked: usize, iters: usize) -> f64 {
    let theta = ((marked as f64) / (domain as f64)).sqrt().asin();
    ((2 * iters + 1) as f64 * theta).sin().powi(2)
}

/// Run `iters` Grover iterations (phase oracle + diffusion) on the uniform
/// state over `domain` and return the final state. `iters` quantum queries.
pub fn run_iterations(
    oracle: &CountedOracle<BitString>,
    domain: &IndexSet,
    iters: usize,
) -> StateVector {
    let mut state = StateVector::uniform(domain.len());
    for _ in 0..iters {
        apply_phase_oracle(&mut state, oracle, domain).expect("domain within oracle");
        apply_diffusion(&mut state, 0);
    }
    state
}

/// Search with a known number of marked indices: prepare uniform, iterate
/// the optimal count, measure once, verify with one classical query.
///
/// Succeeds with probability `sin^2((2t+1) * asin(sqrt(k/d)))`; a returned
/// index is always verified marked.
pub fn grover_known_count(
    oracle: &CountedOracle<BitString>,
    domain: &IndexSet,
    marked: usize,
    rng: &mut impl Rng,
) -> Result<GroverOutcome, GroverError> {
    if marked == 0 || marked > domain.len() {
        return Err(GroverError::BadMarkedCount {
            marked,
            domain: domain.len(),
        });
    }
    let before = oracle.total_queries();
    let iters = iterations_for_known_count(domain.len(), marked);
    let mut state = run_iterations(oracle, domain, iters);
    let pos = measure(&mut state, 0, rng);
    let index = domain.get(pos);
    let found = (oracle.query(index).expect("domain within oracle") == 1).then_some(index);
    Ok(GroverOutcome {
        found,
        queries_used: oracle.total_queries() - before,
    })
}

/// The iteration-cap schedule for a domain of size `d`. Shared with the
/// tuple-search solver, which runs the same escalation over k-subsets.
pub(crate) fn schedule(d: usize) -> Vec<usize> {
    let m_max = (d as f64).sqrt().ceil() as usize;
    let mut caps = Vec::new();
    let mut m = 1usize;
    loop {
        caps.push(m);
        if m >= m_max {
            break;
        }
        m = (2 * m).min(m_max);
    }
    caps.extend(std::iter::repeat(m_max).take(EXTRA_ROUNDS));
    caps
}

/// Analytic worst-case query count of [`grover_search`] on a domain of size
/// `d`: every round draws its largest possible iteration count and pays one
/// verification query.
#[must_use]
pub fn search_budget(d: usize) -> u64 {
    if d == 0 {
        return 0;
    }
    // sum over rounds of (m - 1) quantum + 1 classical = sum of m
    schedule(d).into_iter().map(|m| m as u64).sum()
}

/// Bounded-error search with an unknown marked count.
///
/// If `X` restricted to `domain` contains a one, returns a verified marked
/// index with probability at least 2/3; if the restriction is all zeros (or
/// the domain is empty), always returns none. Query usage is at most
/// [`search_budget`]`(|I|) <= `[`SEARCH_BUDGET_CONSTANT`]` * sqrt(|I|)` in
/// every case.
pub fn grover_search(
    oracle: &CountedOracle<BitString>,
    domain: &IndexSet,
    rng: &mut impl Rng,
) -> GroverOutcome {
    let before = oracle.total_queries();
    if domain.is_empty() {
        return GroverOutcome {
            found: None,
            queries_used: 0,
        };
    }
    let mut found = None;
    for m in schedule(domain.len()) {
        let t = rng.gen_range(0..m);
        let mut state = run_iterations(oracle, domain, t);
        let pos = measure(&mut state, 0, rng);
        let index = domain.get(pos);
        if oracle.query(index).expect("domain within oracle") == 1 {
            found = Some(index);
            break;
        }
    }
    let queries_used = oracle.total_queries() - before;
    debug_assert!(
        queries_used <= search_budget(domain.len()),
        "search exceeded its budget: {queries_used} > {}",
        search_budget(domain.len())
    );
    GroverOutcome { found, queries_used }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::NORM_TOLERANCE;
    use crate::seeds::trial_rng;

    fn single_marked(n: usize, marked_at: usize) -> BitString {
        let mut bits = vec![0u8; n];
        bits[marked_at - 1] = 1;
        BitString::new(bits).unwrap()
    }

    #[test]
    fn iteration_count_formula() {
        assert_eq!(iterations_for_known_count(4, 1), 1);
        assert_eq!(iterations_for_known_count(16, 1), 3);
        assert_eq!(iterations_for_known_count(64, 1), 6);
        // fully marked domain: zero iterations
        assert_eq!(iterations_for_known_count(8, 8), 0);
    }

    #[test]
    fn four_items_one_marked_is_exact() {
        // d=4, k=1, t=1: success probability exactly 1
        let oracle = CountedOracle::new(single_marked(4, 3));
        let state = run_iterations(&oracle, &IndexSet::full(4), 1);
        let probs = state.marginal(0);
        assert!((probs[2] - 1.0).abs() < NORM_TOLERANCE);
        for (pos, p) in probs.iter().enumerate() {
            if pos != 2 {
                assert!(p.abs() < NORM_TOLERANCE);
            }
        }
    }

    #[test]
    fn sixteen_items_one_marked_matches_closed_form() {
        let oracle = CountedOracle::new(single_marked(16, 7));
        let t = iterations_for_known_count(16, 1);
        let state = run_iterations(&oracle, &IndexSet::full(16), t);
        let p = state.marginal(0)[6];
        let predicted = success_probability(16, 1, t);
        assert!((p - predicted).abs() < NORM_TOLERANCE);
        // the known value for d=16, k=1, t=3
        assert!((predicted - 0.9613).abs() < 5e-4, "predicted {predicted}");
    }

    #[test]
    fn amplitude_law_over_all_small_domains() {
        // every domain size up to 64, every marked count: simulated marked
        // mass equals the closed form within NORM_TOLERANCE
        for d in 1..=64usize {
            for k in 1..=d {
                let mut bits = vec![0u8; d];
                for b in bits.iter_mut().take(k) {
                    *b = 1;
                }
                let oracle = CountedOracle::new(BitString::new(bits).unwrap());
                let t = iterations_for_known_count(d, k);
                let state = run_iterations(&oracle, &IndexSet::full(d), t);
                let marked_mass: f64 = state.marginal(0).iter().take(k).sum();
                let predicted = success_probability(d, k, t);
                assert!(
                    (marked_mass - predicted).abs() < NORM_TOLERANCE,
                    "d={d} k={k} t={t}: {marked_mass} vs {predicted}"
                );
            }
        }
    }

    #[test]
    fn amplitude_law_independent_of_marked_positions() {
        let mut rng = trial_rng(21, 0, 0);
        for _ in 0..50 {
            let d = rand::Rng::gen_range(&mut rng, 2..=48usize);
            let k = rand::Rng::gen_range(&mut rng, 1..=d);
            let x = BitString::random_with_weight(d, k, &mut rng);
            let marked: Vec<usize> = (1..=d).filter(|&i| x.get(i).unwrap() == 1).collect();
            let oracle = CountedOracle::new(x);
            let t = rand::Rng::gen_range(&mut rng, 0..=4usize);
            let state = run_iterations(&oracle, &IndexSet::full(d), t);
            let probs = state.marginal(0);
            let mass: f64 = marked.iter().map(|&i| probs[i - 1]).sum();
            let predicted = success_probability(d, k, t);
            assert!((mass - predicted).abs() < NORM_TOLERANCE, "d={d} k={k} t={t}");
        }
    }

    #[test]
    fn known_count_verifies_and_rejects_bad_counts() {
        let mut rng = trial_rng(22, 0, 0);
        let oracle = CountedOracle::new(single_marked(4, 2));
        let domain = IndexSet::full(4);
        let out = grover_known_count(&oracle, &domain, 1, &mut rng).unwrap();
        assert_eq!(out.found, Some(2)); // success probability 1 at d=4, k=1
        assert_eq!(out.queries_used, 2); // one iteration + one verification

        assert!(grover_known_count(&oracle, &domain, 0, &mut rng).is_err());
        assert!(grover_known_count(&oracle, &domain, 5, &mut rng).is_err());
    }

    #[test]
    fn fully_marked_domain_needs_no_iterations() {
        let mut rng = trial_rng(23, 0, 0);
        let oracle = CountedOracle::new(BitString::ones(8));
        let out = grover_known_count(&oracle, &IndexSet::full(8), 8, &mut rng).unwrap();
        assert!(out.found.is_some());
        assert_eq!(out.queries_used, 1); // verification only
    }

    #[test]
    fn search_on_all_zero_restriction_always_returns_none() {
        for trial in 0..300u64 {
            let mut rng = trial_rng(24, 0, trial);
            let oracle = CountedOracle::new(BitString::zeros(19));
            let out = grover_search(&oracle, &IndexSet::range(3, 17), &mut rng);
            assert_eq!(out.found, None);
            assert!(out.queries_used <= search_budget(15));
        }
    }

    #[test]
    fn search_on_all_ones_succeeds_immediately() {
        for trial in 0..100u64 {
            let mut rng = trial_rng(25, 0, trial);
            let oracle = CountedOracle::new(BitString::ones(12));
            let out = grover_search(&oracle, &IndexSet::full(12), &mut rng);
            assert!(out.found.is_some());
        }
    }

    #[test]
    fn search_single_marked_of_64_meets_two_thirds() {
        let trials = 10_000u64;
        let mut hits = 0u64;
        for trial in 0..trials {
            let mut rng = trial_rng(26, 0, trial);
            let oracle = CountedOracle::new(single_marked(64, 41));
            let out = grover_search(&oracle, &IndexSet::full(64), &mut rng);
            if let Some(found) = out.found {
                assert_eq!(found, 41, "one-sidedness: only the marked index may be returned");
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        assert!(freq >= 2.0 / 3.0, "success frequency {freq}");
    }

    #[test]
    fn search_is_one_sided_across_random_inputs() {
        let mut rng = trial_rng(27, 0, 0);
        for _ in 0..400 {
            let n = rand::Rng::gen_range(&mut rng, 1..=24usize);
            let x = BitString::random(n, &mut rng);
            let lo = rand::Rng::gen_range(&mut rng, 1..=n);
            let hi = rand::Rng::gen_range(&mut rng, lo..=n);
            let domain = IndexSet::range(lo, hi);
            let oracle = CountedOracle::new(x.clone());
            let out = grover_search(&oracle, &domain, &mut rng);
            if let Some(i) = out.found {
                assert!(domain.contains(i));
                assert_eq!(x.get(i).unwrap(), 1);
            } else {
                // misses are allowed; but an all-zero restriction must miss
            }
            if x.restrict(&domain).weight() == 0 {
                assert_eq!(out.found, None);
            }
        }
    }

    #[test]
    fn search_succeeds_for_every_marked_count_at_moderate_size() {
        // per-count success over seeded trials stays >= 2/3 for all k at d=24
        let d = 24usize;
        let trials = 600u64;
        for k in 1..=d {
            let mut hits = 0u64;
            for trial in 0..trials {
                let mut rng = trial_rng(28, k as u64, trial);
                let x = BitString::random_with_weight(d, k, &mut rng);
                let oracle = CountedOracle::new(x);
                if grover_search(&oracle, &IndexSet::full(d), &mut rng).found.is_some() {
                    hits += 1;
                }
            }
            let freq = hits as f64 / trials as f64;
            assert!(freq >= 2.0 / 3.0, "k={k}: frequency {freq}");
        }
    }

    #[test]
    fn budget_is_within_the_fixed_constant() {
        for d in 1..=4096usize {
            let budget = search_budget(d) as f64;
            assert!(
                budget <= SEARCH_BUDGET_CONSTANT * (d as f64).sqrt(),
                "d={d}: budget {budget}"
            );
        }
        assert_eq!(search_budget(0), 0);
    }

    #[test]
    fn empty_domain_is_free() {
        let mut rng = trial_rng(29, 0, 0);
        let oracle = CountedOracle::new(BitString::zeros(5));
        let out = grover_search(&oracle, &IndexSet::range(4, 3), &mut rng);
        assert_eq!(out.found, None);
        assert_eq!(out.queries_used, 0);
        assert_eq!(oracle.total_queries(), 0);
    }
}
