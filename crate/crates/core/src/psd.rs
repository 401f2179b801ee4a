//! Canonical-answer search routines.
//!
//! A randomized routine is pseudo-deterministic when it lands on one fixed
//! valid answer with probability at least 2/3, rather than scattering over
//! the valid set. The routines here all share one recipe: pick the answer
//! that an ideal run would make canonical (smallest marked index, or the
//! index-maximal solution tuple), then drive a bounded-error search toward
//! exactly that answer with repetition counts tuned so every step of the
//! walk is reliable.
//!
//! * [`psd_grover_first_index`]: smallest one-position of a bit string in
//!   O(sqrt(N)) oracle queries.
//! * [`prunable_canonicalize`]: index-maximal solution tuple of a subset
//!   predicate, given any bounded-error tuple finder as the inner engine.
//! * [`majority_amplify`]: generic modal-answer booster used to sharpen a
//!   2/3 mode into a near-certain one.

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use crate::grover::{grover_search, search_budget};
use crate::oracle::{BitString, CountedOracle, IndexSet, OracleError, ValueSeq};
use crate::problems::subset::{grover_subset_solver, SubsetProblem, SubsetSolution};
use crate::seeds::TrialRng;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PsdError {
    /// The final check read a zero where a one was promised: either the
    /// input was all zeros, or an improbable run of inner failures walked
    /// past every one.
    #[error("landed on an unmarked index; input may be all zeros")]
    PromiseViolation,
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Fixed constant with [`first_index_budget`]`(n) <= C' * sqrt(n)`.
pub const FIRST_INDEX_BUDGET_CONSTANT: f64 = 120.0;

/// Worst-case query count of [`psd_grover_first_index`] on an n-bit input:
/// level k of the halving walk makes k+2 bounded-error searches over a
/// window of `2^ceil(log2 n) / 2^(k+1)` indices, plus one final classical
/// check.
#[must_use]
pub fn first_index_budget(n: usize) -> u64 {
    let padded = n.max(1).next_power_of_two();
    let levels = padded.trailing_zeros() as u64;
    let mut total = 1; // final verification query
    for k in 0..levels {
        let window = padded >> (k + 1);
        total += (k + 2) * search_budget(window);
    }
    total
}

/// Smallest index holding a one, pseudo-deterministically.
///
/// Binary descent: at each level, search the left half of the current
/// window; a verified hit means the smallest one lies there, no hit means
/// (with high probability) it lies right. Level k repeats its search k+2
/// times so the total chance that any level sends the walk the wrong way
/// is at most `sum 3^-(k+2) = 1/6`. The walk therefore ends at the
/// smallest one-index with probability at least 5/6, and the closing
/// classical read makes the output one-sided: a returned index always
/// holds a one, and an all-zero input always errors.
///
/// Queries stay within [`first_index_budget`]`(n)`, which is
/// O(sqrt(n) * C') with C' = [`FIRST_INDEX_BUDGET_CONSTANT`].
pub fn psd_grover_first_index(
    oracle: &CountedOracle<BitString>,
    rng: &mut impl Rng,
) -> Result<usize, PsdError> {
    let n = oracle.len();
    assert!(n >= 1, "empty input has no first index");
    let padded = n.next_power_of_two();
    // ground truth for debug builds only: checks the window invariant for
    // as long as no inner search has failed
    #[cfg(debug_assertions)]
    let truth = oracle.peek().first_one();
    #[cfg(debug_assertions)]
    let mut searches_all_honest = true;

    let mut lo = 1usize;
    let mut hi = padded;
    for level in 0..padded.trailing_zeros() as usize {
        #[cfg(debug_assertions)]
        if let Some(t) = truth {
            debug_assert!(
                !searches_all_honest || (lo <= t && t <= hi),
                "window [{lo},{hi}] lost index {t} without an inner failure"
            );
        }
        let cur = (lo + hi) / 2;
        let probe = IndexSet::range(lo, cur.min(n));
        let mut found = false;
        for _ in 0..level + 2 {
            if grover_search(oracle, &probe, rng).found.is_some() {
                found = true;
                break;
            }
        }
        if found {
            hi = cur;
        } else {
            #[cfg(debug_assertions)]
            if let Some(t) = truth {
                if lo <= t && t <= cur {
                    searches_all_honest = false;
                }
            }
            lo = cur + 1;
        }
    }
    debug_assert_eq!(lo, hi);
    if lo <= n && oracle.query(lo)? == 1 {
        Ok(lo)
    } else {
        Err(PsdError::PromiseViolation)
    }
}

/// Per-probe repetition count for [`prunable_canonicalize`]:
/// `ceil(10 * log2(max(2, k * log2 n)))`. Large enough that all
/// `k * ceil(log2 n) + 1` probe points of a run stay reliable with room to
/// spare: the total failure probability is below `k log2(n) * 3^-mu`.
#[must_use]
pub fn prunable_mu(k: usize, n: usize) -> u64 {
    let inner = (k as f64) * (n.max(1) as f64).log2();
    (10.0 * inner.max(2.0).log2()).ceil() as u64
}

/// A bounded-error tuple finder: returns a verified solution of the
/// predicate restricted to `domain` with probability at least 2/3 when one
/// exists, never returns an invalid tuple, and always returns none on an
/// unsolvable restriction.
pub trait SubsetSolver {
    fn solve(
        &self,
        problem: &SubsetProblem,
        oracle: &CountedOracle<ValueSeq>,
        domain: &IndexSet,
        rng: &mut TrialRng,
    ) -> Option<SubsetSolution>;
}

/// The quantum tuple finder: Grover over k-subsets of the domain.
#[derive(Debug, Clone, Copy, Default)]
pub struct GroverSubsetSolver;

impl SubsetSolver for GroverSubsetSolver {
    fn solve(
        &self,
        problem: &SubsetProblem,
        oracle: &CountedOracle<ValueSeq>,
        domain: &IndexSet,
        rng: &mut TrialRng,
    ) -> Option<SubsetSolution> {
        grover_subset_solver(problem, oracle, domain, rng)
    }
}

/// A test double standing in for any bounded-error finder: consults the
/// generator-side solution set directly (no oracle charges, its query cost
/// is hypothetical) and fails silently with a configured probability.
/// Useful for exercising the canonicalizer's fault tolerance at failure
/// rates and sizes where the quantum finder would be slow.
#[derive(Debug, Clone, Copy)]
pub struct SimulatedBoundedErrorSolver {
    fail_probability: f64,
}

impl SimulatedBoundedErrorSolver {
    /// `fail_probability` must lie in [0, 1/3], the bounded-error regime.
    #[must_use]
    pub fn new(fail_probability: f64) -> Self {
        assert!(
            (0.0..=1.0 / 3.0).contains(&fail_probability),
            "failure probability outside [0, 1/3]"
        );
        Self { fail_probability }
    }
}

impl SubsetSolver for SimulatedBoundedErrorSolver {
    fn solve(
        &self,
        problem: &SubsetProblem,
        _oracle: &CountedOracle<ValueSeq>,
        domain: &IndexSet,
        rng: &mut TrialRng,
    ) -> Option<SubsetSolution> {
        let all = problem.brute_force_all(domain);
        if all.is_empty() || rng.gen_bool(self.fail_probability) {
            return None;
        }
        let pick = rng.gen_range(0..all.len());
        all.into_iter().nth(pick)
    }
}

/// Index-maximal solution tuple of a subset predicate,
/// pseudo-deterministically, from any bounded-error tuple finder.
///
/// The solution ordered by its index vector is canonical. Its first index
/// is the largest `c` such that the predicate stays solvable inside
/// `{c..n}`; once the first j indices are fixed, the next is the largest
/// `c` such that it stays solvable inside (fixed indices) + `{c..n}`. Each
/// stage finds its largest `c` by binary search, probing a candidate
/// restriction with [`prunable_mu`] inner calls (stopping at the first
/// hit) so a probe on a solvable restriction goes unnoticed with
/// probability at most `3^-mu`. Probes are one-sided: the inner finder
/// never invents a solution, so the search never oversteps; an unlucky
/// understep leaves a tuple that fails the closing verification, in which
/// case the output is none rather than a wrong tuple.
///
/// With a finder of query cost Q, a run costs O(k * log(n) * mu * Q) plus
/// k closing classical reads.
pub fn prunable_canonicalize(
    problem: &SubsetProblem,
    oracle: &CountedOracle<ValueSeq>,
    inner: &dyn SubsetSolver,
    rng: &mut TrialRng,
) -> Option<SubsetSolution> {
    let n = problem.ground_size();
    let k = problem.k();
    let mu = prunable_mu(k, n);
    if !probe_finds(problem, oracle, inner, &IndexSet::full(n), mu, rng) {
        return None;
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut lo = chosen.last().map_or(1, |&p| p + 1);
        if lo > n {
            return None;
        }
        let mut hi = n;
        while lo < hi {
            let cur = lo + (hi - lo + 1) / 2;
            let probe = probe_set(&chosen, cur, n);
            if probe_finds(problem, oracle, inner, &probe, mu, rng) {
                lo = cur;
            } else {
                hi = cur - 1;
            }
        }
        chosen.push(lo);
    }
    let values: Vec<u64> = chosen
        .iter()
        .map(|&i| oracle.query(i))
        .collect::<Result<_, _>>()
        .ok()?;
    if problem.verify(&values, &chosen) {
        Some(SubsetSolution {
            indices: chosen,
            values,
        })
    } else {
        None
    }
}

/// Up to `mu` inner calls on one restriction, stopping at the first
/// verified solution; equivalent in distribution of outcome to the
/// disjunction of all `mu`.
fn probe_finds(
    problem: &SubsetProblem,
    oracle: &CountedOracle<ValueSeq>,
    inner: &dyn SubsetSolver,
    domain: &IndexSet,
    mu: u64,
    rng: &mut TrialRng,
) -> bool {
    (0..mu).any(|_| inner.solve(problem, oracle, domain, rng).is_some())
}

/// Fixed prefix plus the tail `{cur..n}`; the prefix always sits strictly
/// below `cur`.
fn probe_set(chosen: &[usize], cur: usize, n: usize) -> IndexSet {
    let mut indices = chosen.to_vec();
    indices.extend(cur..=n);
    IndexSet::new(indices).expect("prefix below cur keeps indices distinct")
}

/// Run a randomized algorithm `reps` times and return the most frequent
/// output, ties resolved toward the smallest value.
///
/// If the algorithm outputs some canonical value with probability
/// p >= 2/3, the mode of the repetitions misses it with probability at
/// most `exp(-2 * reps * (p - 1/2)^2)`, so reps = 100 pushes a 2/3 mode
/// below 1e-3 failure. Ties breaking toward the smallest keeps the result
/// a deterministic function of the multiset of outputs.
pub fn majority_amplify<T, F>(reps: u64, rng: &mut TrialRng, mut algorithm: F) -> T
where
    T: Ord,
    F: FnMut(&mut TrialRng) -> T,
{
    assert!(reps >= 1, "need at least one repetition");
    let mut counts: BTreeMap<T, u64> = BTreeMap::new();
    for _ in 0..reps {
        *counts.entry(algorithm(rng)).or_insert(0) += 1;
    }
    let mut best: Option<(T, u64)> = None;
    for (value, count) in counts {
        match &best {
            Some((_, top)) if *top >= count => {}
            _ => best = Some((value, count)),
        }
    }
    best.expect("reps >= 1").0
}
