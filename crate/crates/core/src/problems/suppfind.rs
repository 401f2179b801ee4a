//! Support-element search from independent uniform draws.
//!
//! The resource here is not a string oracle but a source: each call to
//! [`UnifSuppState::draw`] consumes one fresh uniform sample from the
//! hidden support `J` of a distribution over `[d]`. The solver takes
//! `ceil(c * d)` draws and returns the smallest element seen. For
//! `c >= ln 3` the smallest member of `J` itself appears among the draws
//! with probability at least `1 - (1 - 1/|J|)^(c*d) >= 1 - 3^(-d/|J|) >=
//! 2/3`, so the output is the canonical answer `min(J)` with probability
//! at least 2/3, and every output is a support member by construction.
//!
//! [`trace_distance_bound`] quantifies why few draws cannot pin down the
//! support exactly: `t` samples from uniform-on-`J` versus uniform-on-`J'`
//! with one element swapped are nearly indistinguishable while `t` is
//! small next to `d`, which is what forces the draw budget to scale with
//! `d` in the first place.

use std::cell::Cell;

use rand::Rng;

use crate::oracle::{IndexSet, OracleError};

/// Draw budget multiplier at which the 2/3 guarantee kicks in.
pub const MIN_SAMPLE_FACTOR: f64 = 1.098_612_288_668_109_8; // ln 3

/// A uniform distribution over a hidden nonempty support `J` within `[d]`,
/// with a counter for how many independent samples were consumed.
#[derive(Debug)]
pub struct UnifSuppState {
    d: usize,
    support: IndexSet,
    copies: Cell<u64>,
}

impl UnifSuppState {
    pub fn new(d: usize, support: IndexSet) -> Result<Self, OracleError> {
        if support.is_empty() {
            return Err(OracleError::InvalidEncoding(
                "support must be nonempty".into(),
            ));
        }
        let max = support.get(support.len() - 1);
        if d == 0 || max > d {
            return Err(OracleError::IndexOutOfRange { index: max, len: d });
        }
        Ok(Self {
            d,
            support,
            copies: Cell::new(0),
        })
    }

    /// Uniform over the whole domain.
    #[must_use]
    pub fn full(d: usize) -> Self {
        Self::new(d, IndexSet::full(d)).expect("full support is valid")
    }

    #[must_use]
    pub fn domain_size(&self) -> usize {
        self.d
    }

    #[must_use]
    pub fn support(&self) -> &IndexSet {
        &self.support
    }

    /// Samples consumed so far.
    #[must_use]
    pub fn copies_used(&self) -> u64 {
        self.copies.get()
    }

    /// One fresh uniform sample from the support.
    pub fn draw(&self, rng: &mut impl Rng) -> usize {
        self.copies.set(self.copies.get() + 1);
        self.support.get(rng.gen_range(0..self.support.len()))
    }
}

/// Take `ceil(c * d)` draws and return the smallest element seen.
///
/// The output is always a support member; it equals `min(J)` with
/// probability at least 2/3 once `c >= ln 3` (see [`MIN_SAMPLE_FACTOR`]).
/// Smaller `c` is accepted so the decay below the guarantee can be
/// measured, but nothing is promised there.
pub fn suppfind(state: &UnifSuppState, c: f64, rng: &mut impl Rng) -> usize {
    assert!(c > 0.0, "sample factor must be positive");
    let t = (c * state.domain_size() as f64).ceil() as u64;
    let mut best = usize::MAX;
    for _ in 0..t.max(1) {
        best = best.min(state.draw(rng));
    }
    best
}

/// Upper bound on how distinguishable `t` draws are between two uniform
/// supports of size `d - 1` differing in a single element:
/// `sqrt(1 - (1 - 1/(d-1))^(2t))`. Below 1/2 whenever `t < (d - 1) / 8`,
/// so an algorithm this frugal answers with noticeable probability on the
/// wrong support too.
#[must_use]
pub fn trace_distance_bound(d: usize, t: u64) -> f64 {
    assert!(d >= 2, "need at least two elements");
    let keep = 1.0 - 1.0 / (d - 1) as f64;
    (1.0 - keep.powi(2 * t as i32)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::trial_rng;

    #[test]
    fn construction_validates_support() {
        assert!(UnifSuppState::new(4, IndexSet::new(vec![1, 5]).unwrap()).is_err());
        assert!(UnifSuppState::new(0, IndexSet::new(vec![1]).unwrap()).is_err());
        assert!(UnifSuppState::new(4, IndexSet::new(vec![]).unwrap()).is_err());
        let st = UnifSuppState::new(4, IndexSet::new(vec![2, 4]).unwrap()).unwrap();
        assert_eq!(st.domain_size(), 4);
    }

    #[test]
    fn singleton_support_is_found_every_time() {
        let st = UnifSuppState::new(12, IndexSet::new(vec![7]).unwrap()).unwrap();
        let mut rng = trial_rng(80, 0, 0);
        for _ in 0..50 {
            assert_eq!(suppfind(&st, MIN_SAMPLE_FACTOR, &mut rng), 7);
        }
        // ceil(ln3 * 12) = 14 draws per call
        assert_eq!(st.copies_used(), 50 * 14);
    }

    #[test]
    fn output_is_always_a_support_member() {
        for t in 0..150u64 {
            let mut rng = trial_rng(81, 0, t);
            let d = rng.gen_range(2..30usize);
            let members: Vec<usize> = (1..=d).filter(|_| rng.gen_bool(0.4)).collect();
            let members = if members.is_empty() { vec![d] } else { members };
            let st = UnifSuppState::new(d, IndexSet::new(members).unwrap()).unwrap();
            let out = suppfind(&st, MIN_SAMPLE_FACTOR, &mut rng);
            assert!(st.support().contains(out));
        }
    }

    #[test]
    fn full_domain_success_rate_clears_two_thirds() {
        // d = 16, c = ln 3: success = 1 - (15/16)^18 ~ 0.687
        let st = UnifSuppState::full(16);
        let trials = 10_000u64;
        let mut hits = 0u64;
        for t in 0..trials {
            let mut rng = trial_rng(82, 0, t);
            if suppfind(&st, MIN_SAMPLE_FACTOR, &mut rng) == 1 {
                hits += 1;
            }
        }
        assert!(
            hits * 3 >= trials * 2,
            "success {hits}/{trials} below 2/3"
        );
    }

    #[test]
    fn modal_output_is_the_support_minimum_exhaustively() {
        // every nonempty support over domains up to size 6
        for d in 1..=6usize {
            for mask in 1u32..(1 << d) {
                let members: Vec<usize> =
                    (1..=d).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                let expected = members[0];
                let st = UnifSuppState::new(d, IndexSet::new(members).unwrap()).unwrap();
                let mut counts = vec![0u32; d + 1];
                for t in 0..400u64 {
                    let mut rng = trial_rng(83, (d as u64) << 8 | mask as u64, t);
                    counts[suppfind(&st, MIN_SAMPLE_FACTOR, &mut rng)] += 1;
                }
                let modal = (1..=d).max_by_key(|&i| (counts[i], d - i)).unwrap();
                assert_eq!(modal, expected, "d {d} mask {mask:b}");
            }
        }
    }

    #[test]
    fn distinguishability_stays_small_below_the_draw_threshold() {
        for d in [9usize, 17, 33, 65, 129, 1025] {
            let cutoff = ((d - 1) / 8) as u64;
            for t in 0..cutoff {
                let b = trace_distance_bound(d, t);
                assert!(b < 0.5, "d {d} t {t} bound {b}");
            }
        }
        assert_eq!(trace_distance_bound(64, 0), 0.0);
    }

    #[test]
    fn distinguishability_grows_with_copies_toward_one() {
        let mut prev = -1.0;
        for t in 0..200u64 {
            let b = trace_distance_bound(33, t);
            assert!(b >= prev);
            prev = b;
        }
        assert!(trace_distance_bound(33, 200) > 0.99);
        assert!(trace_distance_bound(2, 3) > 0.999); // keep = 0 once d = 2
    }
}
