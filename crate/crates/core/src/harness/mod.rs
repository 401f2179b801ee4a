//! Statistical verification harness.
//!
//! Three checks and their report types, shared by the library tests, the
//! experiment runner, and the command line:
//!
//! * [`verify_pseudodeterminism`]: does a randomized algorithm land on one
//!   fixed valid answer per input at least a threshold fraction of runs?
//! * [`verify_canonization`]: does a reference algorithm's canonical
//!   answer show up under a cheaper algorithm strictly more often than
//!   that algorithm errs, with Wilson 99% intervals separating the two
//!   rates?
//! * [`query_scaling`]: how does mean query usage grow with input size
//!   (log-log least-squares exponent)?
//!
//! Trials run in parallel but every trial draws its generator from
//! `(seed, stream, trial)` coordinates and aggregation walks trials in
//! index order, so reports are byte-identical across thread counts.

pub mod experiments;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::seeds::{trial_rng, TrialRng};

/// z-score backing the 99% Wilson intervals used by canonization checks.
pub const WILSON_Z: f64 = 2.576;

/// Wilson score interval for a binomial rate.
#[must_use]
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(successes <= trials, "more successes than trials");
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // At the corners the interval touches the boundary exactly; rounding in
    // the quotient above would otherwise leave it a few ulps short.
    let lower = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let upper = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lower, upper)
}

/// One run's result: the produced output, if any, and what it cost.
/// A flagged failure or detected promise violation is `None`.
#[derive(Debug, Clone)]
pub struct TrialOutcome<T> {
    pub output: Option<T>,
    pub classical_queries: u64,
    pub quantum_queries: u64,
}

/// Per-input aggregate of a pseudo-determinism check.
#[derive(Debug, Clone)]
pub struct PsdInputReport<T> {
    pub input_id: String,
    pub trials: u64,
    /// Most frequent outcome; `None` outcomes compete too, so a modal
    /// `None` means the algorithm most often produced nothing.
    pub modal_output: Option<T>,
    pub modal_count: u64,
    /// The modal output exists and the validity predicate accepts it.
    pub modal_valid: bool,
    /// Fraction of trials whose output existed and was valid.
    pub valid_rate: f64,
    pub mean_classical: f64,
    pub mean_quantum: f64,
    pub max_total: u64,
}

impl<T> PsdInputReport<T> {
    #[must_use]
    pub fn modal_frequency(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.modal_count as f64 / self.trials as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct PsdReport<T> {
    pub threshold: f64,
    pub inputs: Vec<PsdInputReport<T>>,
    /// Every input has a valid modal output hit at least the threshold
    /// fraction of trials.
    pub pass: bool,
}

/// Run `trials` independent trials per input and test whether one valid
/// output dominates each input's outcome distribution.
///
/// Trial `t` of input `i` draws from stream `stream_base + i` of `seed`,
/// so adding inputs or reordering trials never perturbs other results.
/// Outcome ties break toward "no output", then smaller outputs, keeping
/// the modal choice deterministic.
pub fn verify_pseudodeterminism<I, T, R, V>(
    inputs: &[(String, I)],
    trials: u64,
    threshold: f64,
    seed: u64,
    stream_base: u64,
    run: R,
    valid: V,
) -> PsdReport<T>
where
    I: Sync,
    T: Ord + Clone + Send,
    R: Fn(&I, &mut TrialRng) -> TrialOutcome<T> + Sync,
    V: Fn(&I, &T) -> bool,
{
    assert!(trials >= 1, "need at least one trial");
    let mut reports = Vec::with_capacity(inputs.len());
    for (index, (id, input)) in inputs.iter().enumerate() {
        let stream = stream_base + index as u64;
        let outcomes: Vec<TrialOutcome<T>> = (0..trials)
            .into_par_iter()
            .map(|t| run(input, &mut trial_rng(seed, stream, t)))
            .collect();
        let mut counts: BTreeMap<Option<T>, u64> = BTreeMap::new();
        let mut valid_count = 0u64;
        let mut classical = 0u64;
        let mut quantum = 0u64;
        let mut max_total = 0u64;
        for outcome in &outcomes {
            if let Some(out) = &outcome.output {
                if valid(input, out) {
                    valid_count += 1;
                }
            }
            classical += outcome.classical_queries;
            quantum += outcome.quantum_queries;
            max_total = max_total.max(outcome.classical_queries + outcome.quantum_queries);
        }
        for outcome in outcomes {
            *counts.entry(outcome.output).or_insert(0) += 1;
        }
        let (modal_output, modal_count) = counts
            .into_iter()
            .fold((None, 0), |best, (value, count)| {
                if count > best.1 {
                    (value, count)
                } else {
                    best
                }
            });
        let modal_valid = modal_output
            .as_ref()
            .is_some_and(|out| valid(input, out));
        reports.push(PsdInputReport {
            input_id: id.clone(),
            trials,
            modal_output,
            modal_count,
            modal_valid,
            valid_rate: valid_count as f64 / trials as f64,
            mean_classical: classical as f64 / trials as f64,
            mean_quantum: quantum as f64 / trials as f64,
            max_total,
        });
    }
    let pass = reports
        .iter()
        .all(|r| r.modal_valid && r.modal_frequency() >= threshold);
    PsdReport {
        threshold,
        inputs: reports,
        pass,
    }
}

/// Per-input aggregate of a canonization check.
#[derive(Debug, Clone)]
pub struct CanonizationInputReport<T> {
    pub input_id: String,
    /// The reference algorithm's modal output; `None` when the reference
    /// itself failed to produce a valid mode, which fails the input.
    pub canonical: Option<T>,
    /// How often the reference hit its mode.
    pub reference_frequency: f64,
    pub trials: u64,
    pub match_count: u64,
    pub wrong_count: u64,
    /// 99% Wilson lower bound on the candidate matching the canonical
    /// output.
    pub match_lower: f64,
    /// 99% Wilson upper bound on the candidate erring (no output, or an
    /// invalid one).
    pub wrong_upper: f64,
    pub separated: bool,
}

#[derive(Debug, Clone)]
pub struct CanonizationReport<T> {
    pub inputs: Vec<CanonizationInputReport<T>>,
    /// Every input's match rate provably exceeds its error rate.
    pub pass: bool,
}

/// Does a candidate algorithm hit the reference's canonical answer more
/// often than it errs?
///
/// The reference runs `reference_trials` times per input to establish the
/// canonical answer (its modal output, which must be valid). The
/// candidate then runs `trials` times; a trial matches when its output
/// equals the canonical answer, and errs when it produces no output or an
/// invalid one. The input passes when the 99% Wilson lower bound of the
/// match rate exceeds the 99% Wilson upper bound of the error rate.
/// Reference and candidate use separate stream pairs per input.
#[allow(clippy::too_many_arguments)]
pub fn verify_canonization<I, T, RB, RA, V>(
    inputs: &[(String, I)],
    reference_trials: u64,
    trials: u64,
    seed: u64,
    stream_base: u64,
    run_reference: RB,
    run_candidate: RA,
    valid: V,
) -> CanonizationReport<T>
where
    I: Sync,
    T: Ord + Clone + Send,
    RB: Fn(&I, &mut TrialRng) -> Option<T> + Sync,
    RA: Fn(&I, &mut TrialRng) -> Option<T> + Sync,
    V: Fn(&I, &T) -> bool,
{
    assert!(reference_trials >= 1 && trials >= 1);
    let mut reports = Vec::with_capacity(inputs.len());
    for (index, (id, input)) in inputs.iter().enumerate() {
        let ref_stream = stream_base + 2 * index as u64;
        let cand_stream = ref_stream + 1;
        let reference: Vec<Option<T>> = (0..reference_trials)
            .into_par_iter()
            .map(|t| run_reference(input, &mut trial_rng(seed, ref_stream, t)))
            .collect();
        let mut counts: BTreeMap<Option<T>, u64> = BTreeMap::new();
        for out in reference {
            *counts.entry(out).or_insert(0) += 1;
        }
        let (mode, mode_count) = counts
            .into_iter()
            .fold((None, 0), |best, (value, count)| {
                if count > best.1 {
                    (value, count)
                } else {
                    best
                }
            });
        let canonical = match mode {
            Some(out) if valid(input, &out) => Some(out),
            _ => None,
        };
        let outputs: Vec<Option<T>> = (0..trials)
            .into_par_iter()
            .map(|t| run_candidate(input, &mut trial_rng(seed, cand_stream, t)))
            .collect();
        let mut match_count = 0u64;
        let mut wrong_count = 0u64;
        for out in &outputs {
            match out {
                Some(v) => {
                    if canonical.as_ref() == Some(v) {
                        match_count += 1;
                    } else if !valid(input, v) {
                        wrong_count += 1;
                    }
                }
                None => wrong_count += 1,
            }
        }
        let (match_lower, _) = wilson_interval(match_count, trials, WILSON_Z);
        let (_, wrong_upper) = wilson_interval(wrong_count, trials, WILSON_Z);
        let separated = canonical.is_some() && match_lower > wrong_upper;
        reports.push(CanonizationInputReport {
            input_id: id.clone(),
            canonical,
            reference_frequency: mode_count as f64 / reference_trials as f64,
            trials,
            match_count,
            wrong_count,
            match_lower,
            wrong_upper,
            separated,
        });
    }
    let pass = reports.iter().all(|r| r.separated);
    CanonizationReport {
        inputs: reports,
        pass,
    }
}

#[derive(Debug, Clone)]
pub struct ScalingPoint {
    pub size: u64,
    pub trials: u64,
    pub mean_queries: f64,
    pub max_queries: u64,
}

#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    /// Log-log least-squares slope of mean queries against size.
    pub exponent: f64,
}

/// Mean query usage per size and the fitted growth exponent.
///
/// `run` receives `(size, generator)` and returns one trial's total query
/// count; input generation belongs inside it. At least two sizes are
/// required, and a trustworthy exponent wants sizes spanning at least two
/// doublings.
pub fn query_scaling<R>(sizes: &[u64], trials: u64, seed: u64, stream_base: u64, run: R) -> ScalingReport
where
    R: Fn(u64, &mut TrialRng) -> u64 + Sync,
{
    assert!(sizes.len() >= 2, "an exponent needs at least two sizes");
    assert!(trials >= 1);
    let mut points = Vec::with_capacity(sizes.len());
    for (index, &size) in sizes.iter().enumerate() {
        let stream = stream_base + index as u64;
        let queries: Vec<u64> = (0..trials)
            .into_par_iter()
            .map(|t| run(size, &mut trial_rng(seed, stream, t)))
            .collect();
        let total: u64 = queries.iter().sum();
        points.push(ScalingPoint {
            size,
            trials,
            mean_queries: total as f64 / trials as f64,
            max_queries: queries.into_iter().max().unwrap_or(0),
        });
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|p| ((p.size as f64).ln(), p.mean_queries.max(f64::MIN_POSITIVE).ln()))
        .collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = logs.iter().map(|(_, y)| y).sum::<f64>() / n;
    let covariance: f64 = logs
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let variance: f64 = logs.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    ScalingReport {
        points,
        exponent: covariance / variance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn wilson_reference_values() {
        // 50/100 at z = 1.96: the textbook (0.4038, 0.5962)
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!((lo - 0.4038).abs() < 5e-4, "lo {lo}");
        assert!((hi - 0.5962).abs() < 5e-4, "hi {hi}");
        // degenerate corners
        assert_eq!(wilson_interval(0, 0, 2.0), (0.0, 1.0));
        let (lo, hi) = wilson_interval(0, 50, 2.576);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.2);
        let (lo, hi) = wilson_interval(50, 50, 2.576);
        assert!(lo > 0.8 && lo < 1.0);
        assert_eq!(hi, 1.0);
        // wider z, wider interval
        let narrow = wilson_interval(30, 100, 1.0);
        let wide = wilson_interval(30, 100, 3.0);
        assert!(wide.0 < narrow.0 && wide.1 > narrow.1);
    }

    fn outcome<T>(output: Option<T>, queries: u64) -> TrialOutcome<T> {
        TrialOutcome {
            output,
            classical_queries: queries,
            quantum_queries: 0,
        }
    }

    #[test]
    fn psd_check_accepts_a_sharp_mode_and_rejects_a_flat_one() {
        let inputs: Vec<(String, u32)> = (0..3).map(|i| (format!("in{i}"), i)).collect();
        // sharp: outputs the input's own value 80% of trials
        let sharp = verify_pseudodeterminism(
            &inputs,
            2000,
            2.0 / 3.0,
            11,
            0,
            |&input, rng| {
                let out = if rng.gen_bool(0.8) { input } else { input + 100 };
                outcome(Some(out), 3)
            },
            |&input, &out| out == input || out == input + 100,
        );
        assert!(sharp.pass);
        assert_eq!(sharp.inputs.len(), 3);
        for r in &sharp.inputs {
            assert!(r.modal_valid && r.modal_frequency() > 0.75);
            assert_eq!(r.mean_classical, 3.0);
            assert_eq!(r.max_total, 3);
            assert_eq!(r.valid_rate, 1.0);
        }
        // flat: uniform over four valid values never reaches 2/3
        let flat = verify_pseudodeterminism(
            &inputs,
            2000,
            2.0 / 3.0,
            11,
            10,
            |_, rng| outcome(Some(rng.gen_range(0..4u32)), 1),
            |_, _| true,
        );
        assert!(!flat.pass);
    }

    #[test]
    fn psd_check_rejects_an_invalid_mode_and_counts_none_as_an_outcome() {
        let inputs = vec![("only".to_string(), ())];
        // modal output is invalid
        let bad = verify_pseudodeterminism(
            &inputs,
            500,
            0.5,
            12,
            0,
            |(), _| outcome(Some(9u32), 1),
            |(), &out| out != 9,
        );
        assert!(!bad.pass && !bad.inputs[0].modal_valid);
        // mostly produces nothing: modal outcome is none
        let silent = verify_pseudodeterminism(
            &inputs,
            500,
            0.5,
            13,
            0,
            |(), rng| outcome(rng.gen_bool(0.2).then_some(1u32), 1),
            |(), _| true,
        );
        assert!(!silent.pass);
        assert!(silent.inputs[0].modal_output.is_none());
    }

    #[test]
    fn psd_reports_are_identical_across_thread_counts() {
        let inputs: Vec<(String, u64)> = (0..4).map(|i| (format!("i{i}"), i)).collect();
        let run_once = || {
            verify_pseudodeterminism(
                &inputs,
                400,
                2.0 / 3.0,
                14,
                0,
                |&input, rng| outcome(Some(input + u64::from(rng.gen_bool(0.1))), rng.gen_range(1..5)),
                |_, _| true,
            )
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run_once);
        let quad = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(run_once);
        assert_eq!(single.pass, quad.pass);
        for (a, b) in single.inputs.iter().zip(&quad.inputs) {
            assert_eq!(a.modal_output, b.modal_output);
            assert_eq!(a.modal_count, b.modal_count);
            assert_eq!(a.mean_classical.to_bits(), b.mean_classical.to_bits());
            assert_eq!(a.mean_quantum.to_bits(), b.mean_quantum.to_bits());
        }
    }

    #[test]
    fn canonization_separates_a_matching_candidate() {
        let inputs = vec![("x".to_string(), 7u32)];
        let report = verify_canonization(
            &inputs,
            500,
            4000,
            15,
            0,
            |&input, _| Some(input),
            |&input, rng| {
                if rng.gen_bool(0.30) {
                    Some(input) // match
                } else if rng.gen_bool(0.05) {
                    None // error
                } else {
                    Some(input + 1) // valid but different
                }
            },
            |_, _| true,
        );
        assert!(report.pass);
        let r = &report.inputs[0];
        assert_eq!(r.canonical, Some(7));
        assert!(r.match_lower > r.wrong_upper);
        assert!(r.match_lower > 0.25 && r.match_lower < 0.32);
    }

    #[test]
    fn canonization_fails_when_match_rate_hides_in_the_error_rate() {
        let inputs = vec![("x".to_string(), 7u32)];
        let report = verify_canonization(
            &inputs,
            200,
            3000,
            16,
            0,
            |&input, _| Some(input),
            |&input, rng| {
                // matches exactly as often as it errs
                if rng.gen_bool(0.1) {
                    Some(input)
                } else if rng.gen_bool(1.0 / 9.0) {
                    None
                } else {
                    Some(input + 1)
                }
            },
            |_, _| true,
        );
        assert!(!report.pass);
    }

    #[test]
    fn canonization_fails_when_the_reference_has_no_valid_mode() {
        let inputs = vec![("x".to_string(), ())];
        let invalid_ref = verify_canonization(
            &inputs,
            300,
            300,
            18,
            0,
            |(), _| Some(99u32), // deterministic but invalid
            |(), _| Some(1u32),
            |(), &v| v < 10,
        );
        assert!(!invalid_ref.pass);
        assert!(invalid_ref.inputs[0].canonical.is_none());
    }

    #[test]
    fn scaling_exponents_recover_polynomial_growth() {
        let sizes = [16u64, 32, 64, 128, 256];
        let linear = query_scaling(&sizes, 200, 19, 0, |size, rng| {
            size + rng.gen_range(0..3)
        });
        assert!((linear.exponent - 1.0).abs() < 0.05, "{}", linear.exponent);
        let sqrt = query_scaling(&sizes, 200, 19, 10, |size, rng| {
            (size as f64).sqrt().round() as u64 + rng.gen_range(0..2)
        });
        assert!((sqrt.exponent - 0.5).abs() < 0.08, "{}", sqrt.exponent);
        let constant = query_scaling(&sizes, 200, 19, 20, |_, _| 7);
        assert!(constant.exponent.abs() < 0.02, "{}", constant.exponent);
        assert_eq!(constant.points[0].mean_queries, 7.0);
        assert_eq!(constant.points[0].max_queries, 7);
    }
}
