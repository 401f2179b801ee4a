//! Randomized structural invariants for the data layer.

use proptest::prelude::*;

use psdlab::harness::{wilson_interval, WILSON_Z};
use psdlab::oracle::{BitString, IndexSet};
use psdlab::psd::{first_index_budget, majority_amplify, FIRST_INDEX_BUDGET_CONSTANT};
use psdlab::seeds::trial_rng;

proptest! {
    #[test]
    fn bitstring_hex_round_trips(bits in prop::collection::vec(0u8..=1, 1..200)) {
        let x = BitString::new(bits).unwrap();
        let hex = x.to_hex();
        let back = BitString::from_hex(x.len(), &hex).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn bitstring_xor_parity_is_additive(
        a_bits in prop::collection::vec(0u8..=1, 1..100),
        seed in any::<u64>(),
    ) {
        let n = a_bits.len();
        let a = BitString::new(a_bits).unwrap();
        let b = BitString::random(n, &mut trial_rng(seed, 0, 0));
        let c = a.xor(&b).unwrap();
        prop_assert_eq!(c.parity(), a.parity() ^ b.parity());
        prop_assert_eq!(c.weight() % 2, (a.weight() + b.weight()) % 2);
    }

    #[test]
    fn index_set_get_and_rank_are_inverse(
        mut raw in prop::collection::btree_set(1usize..500, 1..40),
    ) {
        let indices: Vec<usize> = std::mem::take(&mut raw).into_iter().collect();
        let set = IndexSet::new(indices.clone()).unwrap();
        prop_assert_eq!(set.as_slice(), &indices[..]);
        for (r, &i) in indices.iter().enumerate() {
            prop_assert_eq!(set.get(r), i);
            prop_assert_eq!(set.rank(i), Some(r));
        }
    }

    #[test]
    fn restriction_weight_counts_member_ones(
        bits in prop::collection::vec(0u8..=1, 1..120),
        member in prop::collection::btree_set(1usize..120, 1..20),
    ) {
        let n = bits.len();
        let indices: Vec<usize> = member.into_iter().filter(|&i| i <= n).collect();
        prop_assume!(!indices.is_empty());
        let x = BitString::new(bits).unwrap();
        let set = IndexSet::new(indices.clone()).unwrap();
        let restricted = x.restrict(&set);
        let expected: usize = indices
            .iter()
            .map(|&i| usize::from(x.get(i).unwrap() == 1))
            .sum();
        prop_assert_eq!(restricted.len(), indices.len());
        prop_assert_eq!(restricted.weight(), expected);
    }

    #[test]
    fn wilson_interval_contains_the_point_estimate(
        trials in 1u64..10_000,
        frac in 0.0f64..=1.0,
    ) {
        let successes = ((trials as f64) * frac) as u64;
        let p = successes as f64 / trials as f64;
        let (lo, hi) = wilson_interval(successes, trials, WILSON_Z);
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!((0.0..=1.0).contains(&hi));
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
    }

    #[test]
    fn first_index_budget_is_monotone_and_sqrt_bounded(n in 1usize..3000) {
        let here = first_index_budget(n);
        prop_assert!(here <= first_index_budget(n + 1));
        let cap = FIRST_INDEX_BUDGET_CONSTANT * (n as f64).sqrt();
        prop_assert!((here as f64) <= cap, "budget {here} above {cap} at {n}");
    }

    #[test]
    fn majority_of_a_constant_is_that_constant(
        reps in 1u64..60,
        value in any::<u32>(),
        seed in any::<u64>(),
    ) {
        let mut rng = trial_rng(seed, 3, 0);
        let out = majority_amplify(reps, &mut rng, |_| value);
        prop_assert_eq!(out, value);
    }
}
