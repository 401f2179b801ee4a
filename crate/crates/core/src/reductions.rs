//! Reductions between output models.
//!
//! Two constructions, both driven by the same idea: wrap a solver whose
//! only guarantee is "the output is valid" in enough blinding randomness
//! that its answer leaks one targeted bit, or funnels into a first-index
//! search.
//!
//! [`aoes_to_xor`] turns any always-valid solver for the
//! avoid-the-parities problem into a parity extractor for a hidden string,
//! beating a fair coin by exactly `2^-(m+1)`. [`find1_completeness_reduce`]
//! turns a pool of deterministic candidate algorithms with a
//! majority-correct promise into a pseudo-deterministic solver by building
//! the correctness indicator string and finding its first one.

use rand::Rng;
use thiserror::Error;

use crate::oracle::{BitString, CountedOracle, OracleError};
use crate::problems::aoes::AoesAccess;
use crate::psd::{majority_amplify, psd_grover_first_index, PsdError};
use crate::seeds::{trial_rng, TrialRng};

#[derive(Debug, Error)]
pub enum ReductionError {
    /// Fewer than half of the drawn candidates produced a verified answer,
    /// so the first-index promise cannot be relied on.
    #[error("only {weight} of {drawn} drawn candidates verified")]
    MajorityPromise { weight: usize, drawn: usize },
    #[error(transparent)]
    Psd(#[from] PsdError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Virtual block oracle: block j serves mask `Y_j` alone when j is in the
/// chosen set, and `Y_j xor X` otherwise. Only the latter touches the
/// hidden string, so in-set blocks cost nothing; repeated positions charge
/// again, like any counted access.
struct MaskedBlocks<'a> {
    x: &'a CountedOracle<BitString>,
    masks: &'a [BitString],
    membership: &'a [bool],
}

impl AoesAccess for MaskedBlocks<'_> {
    fn block_count(&self) -> usize {
        self.masks.len()
    }

    fn block_len(&self) -> usize {
        self.x.len()
    }

    fn query(&self, block: usize, pos: usize) -> Result<u8, OracleError> {
        if block == 0 || block > self.masks.len() {
            return Err(OracleError::IndexOutOfRange {
                index: block,
                len: self.masks.len(),
            });
        }
        let mask_bit = self.masks[block - 1].get(pos)?;
        if self.membership[block - 1] {
            Ok(mask_bit)
        } else {
            Ok(mask_bit ^ self.x.query(pos)?)
        }
    }
}

/// Does the answer pin down a unique shift bit `t`? Satisfied when the
/// answer matches the mask parities on the chosen set and is off by the
/// constant `t` everywhere else, for exactly one `t`. Zero or two
/// satisfying shifts (the latter happens when the chosen set is
/// everything) both count as unsatisfied.
#[must_use]
pub fn condition_check(
    answer: &BitString,
    membership: &[bool],
    mask_parities: &BitString,
) -> Option<u8> {
    let m = membership.len();
    assert_eq!(answer.len(), m, "answer width mismatch");
    assert_eq!(mask_parities.len(), m, "parity width mismatch");
    let holds = |t: u8| {
        (1..=m).all(|j| {
            let a = answer.get(j).expect("within width");
            let y = mask_parities.get(j).expect("within width");
            if membership[j - 1] {
                a == y
            } else {
                a == y ^ t
            }
        })
    };
    match (holds(0), holds(1)) {
        (true, false) => Some(0),
        (false, true) => Some(1),
        _ => None,
    }
}

/// Parity extraction with the blinding randomness supplied by the caller:
/// chosen set, masks, and the fallback coin are inputs, so the rest is a
/// deterministic function of the solver's answer. See [`aoes_to_xor`] for
/// the usual entry point.
///
/// The solver sees only the masked virtual blocks. When its answer
/// satisfies the shift condition the output is `1 xor t`, which for any
/// valid answer equals the parity of the hidden string; otherwise the
/// fallback coin is returned.
pub fn aoes_to_xor_with<B>(
    solver: B,
    x: &CountedOracle<BitString>,
    membership: &[bool],
    masks: &[BitString],
    fallback: u8,
) -> u8
where
    B: FnOnce(&dyn AoesAccess) -> BitString,
{
    let m = membership.len();
    assert!(m >= 1, "need at least one block");
    assert_eq!(masks.len(), m, "one mask per block");
    assert!(fallback <= 1, "fallback must be a bit");
    for mask in masks {
        assert_eq!(mask.len(), x.len(), "masks must match the string length");
    }
    let virt = MaskedBlocks {
        x,
        masks,
        membership,
    };
    let answer = solver(&virt);
    assert_eq!(answer.len(), m, "solver must answer one bit per block");
    let parities = BitString::new(masks.iter().map(BitString::parity).collect())
        .expect("parities are bits");
    match condition_check(&answer, membership, &parities) {
        Some(t) => 1 ^ t,
        None => fallback,
    }
}

/// Guess the parity of the hidden string from one call to an always-valid
/// solver for the avoid-the-parities problem over `m` blocks.
///
/// Draws a uniform chosen set and uniform masks, shows the solver the
/// masked virtual blocks, and reads the shift bit out of its answer when
/// the condition pins one down. For any solver whose answer is always
/// valid, the output equals the parity with probability exactly
/// `1/2 + 2^-(m+1)`, over this function's randomness.
pub fn aoes_to_xor<B>(
    solver: B,
    x: &CountedOracle<BitString>,
    m: usize,
    rng: &mut impl Rng,
) -> u8
where
    B: FnOnce(&dyn AoesAccess) -> BitString,
{
    assert!(m >= 1, "need at least one block");
    let membership: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.5)).collect();
    let masks: Vec<BitString> = (0..m).map(|_| BitString::random(x.len(), rng)).collect();
    let fallback = rng.gen_range(0..=1u8);
    aoes_to_xor_with(solver, x, &membership, &masks, fallback)
}

/// Parity extraction from a pseudo-deterministic solver: the one permitted
/// solver invocation is implemented as `100 * m` repetitions with a
/// majority vote, which turns a 2/3 modal answer into a near-certain one,
/// and the vote then feeds [`aoes_to_xor_with`]. Correctness probability
/// is at least `1/2 + 2^-(m+2)`.
pub fn psd_aoes_to_xor<B>(
    mut solver: B,
    x: &CountedOracle<BitString>,
    m: usize,
    rng: &mut TrialRng,
) -> u8
where
    B: FnMut(&dyn AoesAccess, &mut TrialRng) -> BitString,
{
    assert!(m >= 1, "need at least one block");
    let membership: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.5)).collect();
    let masks: Vec<BitString> = (0..m).map(|_| BitString::random(x.len(), rng)).collect();
    let fallback = rng.gen_range(0..=1u8);
    let reps = 100 * m as u64;
    let amplified =
        |oracle: &dyn AoesAccess| majority_amplify(reps, rng, |r| solver(oracle, r));
    aoes_to_xor_with(amplified, x, &membership, &masks, fallback)
}

/// What [`find1_completeness_reduce`] produced and what it cost.
#[derive(Debug, Clone)]
pub struct Find1Report<T> {
    /// The selected candidate's output; always verified.
    pub solution: T,
    /// Length of the indicator string (`sample_factor * n`).
    pub z_length: usize,
    /// How many drawn candidates verified.
    pub z_weight: usize,
    /// First-index queries on the indicator string.
    pub z_queries: u64,
    /// Underlying queries spent running the drawn candidates.
    pub candidate_queries: u64,
    /// Underlying queries spent verifying their outputs.
    pub verifier_queries: u64,
}

/// Pseudo-deterministic search built from a pool of deterministic
/// candidate algorithms, assuming a majority of draws verify.
///
/// Draws `sample_factor * n` pool members with a dedicated generator
/// seeded by `draw_seed` (so the draw sequence, hence the canonical
/// outcome, is a function of the seed alone), runs each on the input, and
/// marks which outputs the verifier accepts. The first marked position is
/// then located pseudo-deterministically and that candidate's output is
/// returned: same seed, same answer, with the first-index guarantees
/// carrying over. If the verified draws are not a strict majority the
/// promise is broken and a flagged error is returned instead of a guess.
pub fn find1_completeness_reduce<T, A, V>(
    pool: &[A],
    verifier: V,
    x: &BitString,
    sample_factor: usize,
    draw_seed: u64,
    rng: &mut impl Rng,
) -> Result<Find1Report<T>, ReductionError>
where
    T: Clone,
    A: Fn(&CountedOracle<BitString>) -> T,
    V: Fn(&CountedOracle<BitString>, &T) -> bool,
{
    assert!(!pool.is_empty(), "empty candidate pool");
    assert!(sample_factor >= 1, "need at least one draw per index");
    let count = sample_factor * x.len().max(1);
    let mut draw = trial_rng(draw_seed, 0, 0);
    let mut outcomes: Vec<T> = Vec::with_capacity(count);
    let mut z_bits: Vec<u8> = Vec::with_capacity(count);
    let mut candidate_queries = 0u64;
    let mut verifier_queries = 0u64;
    for _ in 0..count {
        let algo = &pool[draw.gen_range(0..pool.len())];
        let scratch = CountedOracle::new(x.clone());
        let out = algo(&scratch);
        candidate_queries += scratch.total_queries();
        let check = CountedOracle::new(x.clone());
        let ok = verifier(&check, &out);
        verifier_queries += check.total_queries();
        z_bits.push(u8::from(ok));
        outcomes.push(out);
    }
    let weight = z_bits.iter().filter(|&&b| b == 1).count();
    if weight * 2 <= count {
        return Err(ReductionError::MajorityPromise {
            weight,
            drawn: count,
        });
    }
    let z = CountedOracle::new(BitString::new(z_bits).expect("indicator bits"));
    let first = psd_grover_first_index(&z, rng)?;
    Ok(Find1Report {
        solution: outcomes[first - 1].clone(),
        z_length: count,
        z_weight: weight,
        z_queries: z.total_queries(),
        candidate_queries,
        verifier_queries,
    })
}
