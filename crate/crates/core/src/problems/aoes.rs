//! Parity-block avoidance: given m equal-length hidden blocks, output any
//! m-bit string other than the string of block parities.
//!
//! The secret string (one parity bit per block) is the single forbidden
//! answer, so guessing uniformly is correct with probability `1 - 2^-m`,
//! while a deterministic solver can pin down one coordinate with `N/m`
//! queries and be correct always. Both extremes live here; the randomized
//! reduction that turns any solver into a parity estimator lives in
//! [`crate::reductions`].

use rand::Rng;

use crate::oracle::{BitString, CountedOracle, OracleError};

/// A hidden instance: `m` blocks of equal length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AoesInstance {
    blocks: Vec<BitString>,
}

impl AoesInstance {
    /// Build from explicit blocks; all lengths must match and be positive.
    pub fn new(blocks: Vec<BitString>) -> Result<Self, OracleError> {
        let Some(first) = blocks.first() else {
            return Err(OracleError::InvalidEncoding("no blocks".to_string()));
        };
        if first.is_empty() {
            return Err(OracleError::InvalidEncoding("empty blocks".to_string()));
        }
        if let Some(bad) = blocks.iter().find(|b| b.len() != first.len()) {
            return Err(OracleError::LengthMismatch {
                left: bad.len(),
                right: first.len(),
            });
        }
        Ok(Self { blocks })
    }

    /// Split a length-N string into `m` consecutive blocks; `m` must divide N.
    pub fn from_bit_string(x: &BitString, m: usize) -> Result<Self, OracleError> {
        if m == 0 || x.len() % m != 0 {
            return Err(OracleError::InvalidEncoding(format!(
                "{m} blocks do not divide length {}",
                x.len()
            )));
        }
        let len = x.len() / m;
        let blocks = (0..m)
            .map(|j| {
                BitString::new(x.bits()[j * len..(j + 1) * len].to_vec()).expect("bits are bits")
            })
            .collect();
        Ok(Self { blocks })
    }

    /// Uniformly random instance.
    pub fn random(m: usize, block_len: usize, rng: &mut impl Rng) -> Self {
        assert!(m >= 1 && block_len >= 1);
        Self {
            blocks: (0..m).map(|_| BitString::random(block_len, rng)).collect(),
        }
    }

    #[must_use]
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    #[must_use]
    pub fn block_len(&self) -> usize {
        self.blocks[0].len()
    }

    #[must_use]
    pub fn total_len(&self) -> usize {
        self.block_count() * self.block_len()
    }

    #[must_use]
    pub fn blocks(&self) -> &[BitString] {
        &self.blocks
    }

    /// The forbidden answer: block parities, one bit per block. Generator-
    /// side helper; algorithms must pay queries to learn any of it.
    #[must_use]
    pub fn secret(&self) -> BitString {
        BitString::new(self.blocks.iter().map(BitString::parity).collect())
            .expect("parities are bits")
    }

    /// Is `answer` a valid output, i.e. different from the parity string?
    pub fn verify(&self, answer: &BitString) -> Result<bool, OracleError> {
        if answer.len() != self.block_count() {
            return Err(OracleError::LengthMismatch {
                left: answer.len(),
                right: self.block_count(),
            });
        }
        Ok(*answer != self.secret())
    }

    /// Fresh counted oracle over this instance.
    #[must_use]
    pub fn oracle(&self) -> CountedOracle<AoesInstance> {
        CountedOracle::new(self.clone())
    }
}

/// Positional access to a (real or virtual) block instance. Implementors
/// meter every query; `block` and `pos` are 1-based. Shape accessors are
/// public metadata and cost nothing.
pub trait AoesAccess {
    fn block_count(&self) -> usize;
    fn block_len(&self) -> usize;
    fn query(&self, block: usize, pos: usize) -> Result<u8, OracleError>;
}

impl AoesAccess for CountedOracle<AoesInstance> {
    fn block_count(&self) -> usize {
        self.peek().block_count()
    }

    fn block_len(&self) -> usize {
        self.peek().block_len()
    }

    fn query(&self, block: usize, pos: usize) -> Result<u8, OracleError> {
        let inst = self.peek();
        if block == 0 || block > inst.block_count() {
            return Err(OracleError::IndexOutOfRange {
                index: block,
                len: inst.block_count(),
            });
        }
        let bit = inst.blocks[block - 1].get(pos)?;
        self.charge_classical();
        Ok(bit)
    }
}

/// The trivial randomized solver: a uniform guess, zero queries. Valid with
/// probability exactly `1 - 2^-m`, but its output distribution has no mode
/// above `2^-m`, so it is not pseudo-deterministic for any m >= 1.
pub fn aoes_random_sampler(m: usize, rng: &mut impl Rng) -> BitString {
    BitString::random(m, rng)
}

/// The deterministic solver: read all of block 1 (`N/m` queries), output
/// its flipped parity followed by zeros. Always valid, because the first
/// output bit differs from the first parity bit.
pub fn aoes_deterministic(oracle: &(impl AoesAccess + ?Sized)) -> BitString {
    let len = oracle.block_len();
    let mut parity = 0u8;
    for pos in 1..=len {
        parity ^= oracle.query(1, pos).expect("position within block");
    }
    let mut bits = vec![0u8; oracle.block_count()];
    bits[0] = 1 ^ parity;
    BitString::new(bits).expect("bits are bits")
}
