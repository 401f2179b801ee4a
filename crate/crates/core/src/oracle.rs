//! Counted oracle access to hidden inputs.
//!
//! The query model: an algorithm receives a [`CountedOracle`] wrapping an
//! immutable payload (a bit string, a function table, or a value sequence)
//! and must pay for every look at the data. Classical queries read one
//! position; quantum queries are whole-oracle unitary applications performed
//! by the simulator in [`crate::qsim`]. Both are tallied separately and the
//! counters never reset.
//!
//! Bit positions are 1-based throughout: a string of length `n` has
//! positions `1..=n`. Position 1 is the most significant bit of the first
//! byte in the hex encoding.

use std::cell::Cell;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid encoding: {0}")]
    InvalidEncoding(String),
}

/// A fixed binary string `X` with 1-based positions. Ordering is
/// lexicographic on the bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    /// Build from explicit bits; every entry must be 0 or 1.
    pub fn new(bits: Vec<u8>) -> Result<Self, OracleError> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(OracleError::InvalidEncoding(format!(
                "bit value {b} is not 0 or 1"
            )));
        }
        Ok(Self { bits })
    }

    /// All-zero string of length `n`.
    #[must_use]
    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![0; n] }
    }

    /// All-one string of length `n`.
    #[must_use]
    pub fn ones(n: usize) -> Self {
        Self { bits: vec![1; n] }
    }

    /// Parse a string of `'0'`/`'1'` characters; handy in tests.
    pub fn from_str01(s: &str) -> Result<Self, OracleError> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(OracleError::InvalidEncoding(format!(
                    "character {other:?} is not 0 or 1"
                ))),
            })
            .collect::<Result<Vec<u8>, _>>()
            .map(|bits| Self { bits })
    }

    /// Uniformly random string of length `n`.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        Self {
            bits: (0..n).map(|_| rng.gen_range(0..=1u8)).collect(),
        }
    }

    /// Uniformly random string of length `n` with exactly `weight` ones.
    pub fn random_with_weight(n: usize, weight: usize, rng: &mut impl Rng) -> Self {
        assert!(weight <= n, "weight {weight} exceeds length {n}");
        let mut bits = vec![0u8; n];
        for pos in rand::seq::index::sample(rng, n, weight) {
            bits[pos] = 1;
        }
        Self { bits }
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit at 1-based position `i`.
    pub fn get(&self, i: usize) -> Result<u8, OracleError> {
        if i == 0 || i > self.bits.len() {
            return Err(OracleError::IndexOutOfRange {
                index: i,
                len: self.bits.len(),
            });
        }
        Ok(self.bits[i - 1])
    }

    /// XOR of all bits.
    #[must_use]
    pub fn parity(&self) -> u8 {
        self.bits.iter().fold(0, |acc, b| acc ^ b)
    }

    /// Number of ones.
    #[must_use]
    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Position of the first 1, if any (1-based).
    #[must_use]
    pub fn first_one(&self) -> Option<usize> {
        self.bits.iter().position(|&b| b == 1).map(|p| p + 1)
    }

    /// Bitwise XOR with an equal-length string.
    pub fn xor(&self, other: &BitString) -> Result<BitString, OracleError> {
        if self.len() != other.len() {
            return Err(OracleError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(BitString {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    /// The substring `X|_I`: bits at the positions of `I`, in ascending
    /// position order. Every index of `I` must lie in `[1, len]`.
    #[must_use]
    pub fn restrict(&self, idx: &IndexSet) -> BitString {
        let bits = idx
            .iter()
            .map(|i| {
                assert!(
                    i >= 1 && i <= self.bits.len(),
                    "restriction index {i} outside [1, {}]",
                    self.bits.len()
                );
                self.bits[i - 1]
            })
            .collect();
        BitString { bits }
    }

    /// Raw bit slice (0-based); construction and verification helper.
    #[must_use]
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Big-endian hex encoding: position 1 is the most significant bit of
    /// the first byte; the final byte is zero-padded in its low bits.
    #[must_use]
    pub fn to_hex(&self) -> String {
        let mut bytes = vec![0u8; self.bits.len().div_ceil(8)];
        for (pos0, &b) in self.bits.iter().enumerate() {
            if b == 1 {
                bytes[pos0 / 8] |= 0x80 >> (pos0 % 8);
            }
        }
        hex::encode(bytes)
    }

    /// Inverse of [`BitString::to_hex`] given the explicit bit length.
    /// Rejects wrong byte counts and nonzero padding bits.
    pub fn from_hex(n: usize, s: &str) -> Result<Self, OracleError> {
        let bytes =
            hex::decode(s).map_err(|e| OracleError::InvalidEncoding(format!("bad hex: {e}")))?;
        if bytes.len() != n.div_ceil(8) {
            return Err(OracleError::InvalidEncoding(format!(
                "hex encodes {} bytes but length {n} needs {}",
                bytes.len(),
                n.div_ceil(8)
            )));
        }
        let mut bits = Vec::with_capacity(n);
        for pos0 in 0..n {
            bits.push((bytes[pos0 / 8] >> (7 - pos0 % 8)) & 1);
        }
        for pos0 in n..bytes.len() * 8 {
            if (bytes[pos0 / 8] >> (7 - pos0 % 8)) & 1 != 0 {
                return Err(OracleError::InvalidEncoding(
                    "nonzero padding bits".to_string(),
                ));
            }
        }
        Ok(Self { bits })
    }
}

/// A sorted set of distinct 1-based positions; the search domains `I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    /// Build from arbitrary positive indices; sorts and rejects duplicates
    /// and zeros.
    pub fn new(mut indices: Vec<usize>) -> Result<Self, OracleError> {
        indices.sort_unstable();
        if indices.first() == Some(&0) {
            return Err(OracleError::IndexOutOfRange { index: 0, len: 0 });
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(OracleError::InvalidEncoding(
                "duplicate index in index set".to_string(),
            ));
        }
        Ok(Self { indices })
    }

    /// The contiguous range `lo..=hi` (1-based, inclusive); empty if `lo > hi`.
    #[must_use]
    pub fn range(lo: usize, hi: usize) -> Self {
        assert!(lo >= 1, "index sets are 1-based");
        Self {
            indices: (lo..=hi).collect(),
        }
    }

    /// The full domain `[1, n]`.
    #[must_use]
    pub fn full(n: usize) -> Self {
        Self::range(1, n)
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Member at 0-based rank `pos` in ascending order.
    #[must_use]
    pub fn get(&self, pos: usize) -> usize {
        self.indices[pos]
    }

    #[must_use]
    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// 0-based rank of `index` inside the set, if present.
    #[must_use]
    pub fn rank(&self, index: usize) -> Option<usize> {
        self.indices.binary_search(&index).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    #[must_use]
    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    /// 1-based ranks within `self` of the members of `sub`; `None` if `sub`
    /// is not a subset.
    #[must_use]
    pub fn positions_of(&self, sub: &IndexSet) -> Option<IndexSet> {
        let mut positions = Vec::with_capacity(sub.len());
        for i in sub.iter() {
            positions.push(self.rank(i)? + 1);
        }
        Some(IndexSet { indices: positions })
    }
}

/// A total function `f : [0, 2^width) -> [0, 2^width)` stored as a table.
///
/// Basis labels are the big-endian integer readings of `width`-bit strings,
/// so label arithmetic (XOR, dot products) coincides with bitwise string
/// operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    width: u32,
    values: Vec<u64>,
}

impl FunctionTable {
    /// Build from the value table; the length must be `2^width` and every
    /// entry must fit in `width` bits.
    pub fn new(width: u32, values: Vec<u64>) -> Result<Self, OracleError> {
        let size = 1usize
            .checked_shl(width)
            .ok_or_else(|| OracleError::InvalidEncoding(format!("width {width} too large")))?;
        if values.len() != size {
            return Err(OracleError::LengthMismatch {
                left: values.len(),
                right: size,
            });
        }
        if let Some(&v) = values.iter().find(|&&v| v >= size as u64) {
            return Err(OracleError::InvalidEncoding(format!(
                "table entry {v} does not fit in {width} bits"
            )));
        }
        Ok(Self { width, values })
    }

    #[must_use]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[must_use]
    pub fn domain_size(&self) -> usize {
        1 << self.width
    }

    /// `f(x)`; panics if `x` is outside the domain.
    #[must_use]
    pub fn eval(&self, x: u64) -> u64 {
        self.values[usize::try_from(x).expect("domain label fits in usize")]
    }

    #[must_use]
    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// A hidden sequence of symbols from a finite alphabet, the input to the
/// k-subset search problems. Positions are 1-based like [`BitString`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSeq {
    values: Vec<u64>,
}

impl ValueSeq {
    #[must_use]
    pub fn new(values: Vec<u64>) -> Self {
        Self { values }
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at 1-based position `i`.
    pub fn get(&self, i: usize) -> Result<u64, OracleError> {
        if i == 0 || i > self.values.len() {
            return Err(OracleError::IndexOutOfRange {
                index: i,
                len: self.values.len(),
            });
        }
        Ok(self.values[i - 1])
    }

    #[must_use]
    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// An oracle wrapper that meters every access to its payload.
///
/// Classical queries go through the typed `query` methods. Quantum queries
/// are whole-payload unitary applications; the simulator obtains the payload
/// through [`CountedOracle::quantum_payload`], which charges the quantum
/// counter once per gate application. No algorithm in this crate reads a
/// payload by any other route; the only uncounted accessor, [`peek`], is
/// crate-private and exists for debug assertions, simulated test doubles,
/// and typed query implementations that charge the counters explicitly.
///
/// [`peek`]: CountedOracle::peek
#[derive(Debug)]
pub struct CountedOracle<P> {
    payload: P,
    classical: Cell<u64>,
    quantum: Cell<u64>,
}

impl<P> CountedOracle<P> {
    pub fn new(payload: P) -> Self {
        Self {
            payload,
            classical: Cell::new(0),
            quantum: Cell::new(0),
        }
    }

    #[must_use]
    pub fn classical_queries(&self) -> u64 {
        self.classical.get()
    }

    #[must_use]
    pub fn quantum_queries(&self) -> u64 {
        self.quantum.get()
    }

    #[must_use]
    pub fn total_queries(&self) -> u64 {
        self.classical.get() + self.quantum.get()
    }

    /// Payload access for one quantum gate application; charges the quantum
    /// counter by `cost` (1 for a plain oracle gate, `k` for a derived gate
    /// that would evaluate the input at `k` positions).
    pub(crate) fn quantum_payload_charged(&self, cost: u64) -> &P {
        self.quantum.set(self.quantum.get() + cost);
        &self.payload
    }

    /// Payload access for one quantum gate application, unit cost.
    pub(crate) fn quantum_payload(&self) -> &P {
        self.quantum_payload_charged(1)
    }

    /// Uncounted payload access. Reserved for debug-mode ground-truth
    /// assertions and for simulated solver stand-ins; never part of a
    /// counted algorithm's query path.
    pub(crate) fn peek(&self) -> &P {
        &self.payload
    }

    /// Count one classical query. Paired with [`peek`] by typed query
    /// methods in sibling modules; bounds checks happen before the charge so
    /// failed queries stay free.
    ///
    /// [`peek`]: CountedOracle::peek
    pub(crate) fn charge_classical(&self) {
        self.classical.set(self.classical.get() + 1);
    }
}

impl CountedOracle<BitString> {
    /// Length of the hidden string; public problem metadata, not a query.
    #[must_use]
    pub fn len(&self) -> usize {
        self.payload.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.payload.is_empty()
    }

    /// Classical query: the bit at 1-based position `i`. Counts even when
    /// the position was queried before.
    pub fn query(&self, i: usize) -> Result<u8, OracleError> {
        let bit = self.payload.get(i)?;
        self.charge_classical();
        Ok(bit)
    }
}

impl CountedOracle<FunctionTable> {
    #[must_use]
    pub fn width(&self) -> u32 {
        self.payload.width()
    }

    #[must_use]
    pub fn domain_size(&self) -> usize {
        self.payload.domain_size()
    }

    /// Classical query: `f(x)`.
    pub fn query(&self, x: u64) -> Result<u64, OracleError> {
        if x >= self.payload.domain_size() as u64 {
            return Err(OracleError::IndexOutOfRange {
                index: x as usize,
                len: self.payload.domain_size(),
            });
        }
        self.charge_classical();
        Ok(self.payload.eval(x))
    }
}

impl CountedOracle<ValueSeq> {
    #[must_use]
    pub fn len(&self) -> usize {
        self.payload.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.payload.is_empty()
    }

    /// Classical query: the symbol at 1-based position `i`.
    pub fn query(&self, i: usize) -> Result<u64, OracleError> {
        let v = self.payload.get(i)?;
        self.charge_classical();
        Ok(v)
    }
}
