//! Dense statevector simulation of oracle circuits.
//!
//! States live over an ordered list of registers; register 0 is the most
//! significant in the basis index. Register dimensions are arbitrary, not
//! just powers of two: a search over a domain of 48 indices is a 48-dim
//! vector, and the diffusion step is inversion about the mean in that
//! dimension. Amplitudes are `Complex64`; gates preserve the norm to within
//! [`NORM_TOLERANCE`], which is asserted after every gate in debug builds.
//!
//! Oracle gates charge their [`CountedOracle`]'s quantum counter exactly
//! once per application, whatever the state is.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::oracle::{BitString, CountedOracle, FunctionTable, IndexSet};

/// Absolute tolerance for norm preservation and distribution checks.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QsimError {
    #[error("state has {found} registers, expected {expected}")]
    RegisterCount { expected: usize, found: usize },
    #[error("register {register} has dimension {found}, expected {expected}")]
    RegisterDim {
        register: usize,
        expected: usize,
        found: usize,
    },
    #[error("register {register} dimension {dim} is not a power of two")]
    NotPowerOfTwo { register: usize, dim: usize },
    #[error("domain index {index} outside oracle range {len}")]
    DomainMismatch { index: usize, len: usize },
}

/// A pure state over a fixed register layout.
#[derive(Debug, Clone)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|coords>`.
    #[must_use]
    pub fn basis(dims: &[usize], coords: &[usize]) -> Self {
        assert_eq!(dims.len(), coords.len(), "one coordinate per register");
        assert!(dims.iter().all(|&d| d > 0), "registers must be nonempty");
        for (r, (&d, &c)) in dims.iter().zip(coords).enumerate() {
            assert!(c < d, "coordinate {c} outside register {r} of dim {d}");
        }
        let total: usize = dims.iter().product();
        let mut amps = vec![Complex64::new(0.0, 0.0); total];
        let mut index = 0usize;
        for (&d, &c) in dims.iter().zip(coords) {
            index = index * d + c;
        }
        amps[index] = Complex64::new(1.0, 0.0);
        Self {
            dims: dims.to_vec(),
            amps,
        }
    }

    /// Uniform superposition over a single register of dimension `dim`.
    #[must_use]
    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0, "empty register");
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            dims: vec![dim],
            amps: vec![a; dim],
        }
    }

    /// Build from explicit amplitudes over the given layout.
    #[must_use]
    pub fn from_amplitudes(dims: &[usize], amps: Vec<Complex64>) -> Self {
        let total: usize = dims.iter().product();
        assert_eq!(amps.len(), total, "amplitude count must match layout");
        Self {
            dims: dims.to_vec(),
            amps,
        }
    }

    #[must_use]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[must_use]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude of the basis state `|coords>`.
    #[must_use]
    pub fn amplitude(&self, coords: &[usize]) -> Complex64 {
        assert_eq!(coords.len(), self.dims.len());
        let mut index = 0usize;
        for (&d, &c) in self.dims.iter().zip(coords) {
            assert!(c < d);
            index = index * d + c;
        }
        self.amps[index]
    }

    #[must_use]
    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability distribution of measuring register `reg`, marginalized
    /// over all other registers.
    #[must_use]
    pub fn marginal(&self, reg: usize) -> Vec<f64> {
        let (stride, dim) = self.stride_of(reg);
        let mut probs = vec![0.0; dim];
        for (i, a) in self.amps.iter().enumerate() {
            probs[(i / stride) % dim] += a.norm_sqr();
        }
        probs
    }

    /// Stride and dimension of register `reg` in the flat amplitude index.
    fn stride_of(&self, reg: usize) -> (usize, usize) {
        assert!(reg < self.dims.len(), "no register {reg}");
        let stride: usize = self.dims[reg + 1..].iter().product();
        (stride, self.dims[reg])
    }

    fn debug_check_norm(&self) {
        debug_assert!(
            (self.norm_sq() - 1.0).abs() < NORM_TOLERANCE,
            "state norm drifted: {}",
            self.norm_sq()
        );
    }

    /// Global-phase-insensitive distance: `min_phi || a - e^(i phi) b ||_inf`.
    #[must_use]
    pub fn phase_distance(&self, other: &StateVector) -> f64 {
        assert_eq!(self.dims, other.dims);
        // align on the largest amplitude of self
        let (k, _) = self
            .amps
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .expect("nonempty state");
        let phase = if other.amps[k].norm_sqr() > 0.0 {
            let p = self.amps[k] / other.amps[k];
            p / Complex64::new(p.norm(), 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b * phase).norm())
            .fold(0.0, f64::max)
    }
}

fn check_layout(state: &StateVector, expected: &[usize]) -> Result<(), QsimError> {
    if state.dims.len() != expected.len() {
        return Err(QsimError::RegisterCount {
            expected: expected.len(),
            found: state.dims.len(),
        });
    }
    for (r, (&want, &have)) in expected.iter().zip(&state.dims).enumerate() {
        if want != have {
            return Err(QsimError::RegisterDim {
                register: r,
                expected: want,
                found: have,
            });
        }
    }
    Ok(())
}

fn check_domain(oracle_len: usize, domain: &IndexSet) -> Result<(), QsimError> {
    for i in domain.iter() {
        if i == 0 || i > oracle_len {
            return Err(QsimError::DomainMismatch {
                index: i,
                len: oracle_len,
            });
        }
    }
    Ok(())
}

/// Bit-oracle gate `|pos>|j> -> |pos>|j XOR X_i>` where `i` is the
/// `pos`-th member of `domain`. The state must be an index register of
/// dimension `|domain|` followed by one qubit. One quantum query.
pub fn apply_bit_oracle(
    state: &mut StateVector,
    oracle: &CountedOracle<BitString>,
    domain: &IndexSet,
) -> Result<(), QsimError> {
    check_layout(state, &[domain.len(), 2])?;
    check_domain(oracle.len(), domain)?;
    let x = oracle.quantum_payload();
    for pos in 0..domain.len() {
        if x.get(domain.get(pos)).expect("domain checked") == 1 {
            state.amps.swap(2 * pos, 2 * pos + 1);
        }
    }
    state.debug_check_norm();
    Ok(())
}

/// Phase-oracle gate: the amplitude of `|pos>` picks up `(-1)^(X_i)` where
/// `i` is the `pos`-th member of `domain`. Register 0 must have dimension
/// `|domain|`; any further registers ride along untouched. One quantum query.
pub fn apply_phase_oracle(
    state: &mut StateVector,
    oracle: &CountedOracle<BitString>,
    domain: &IndexSet,
) -> Result<(), QsimError> {
    if state.dims.is_empty() || state.dims[0] != domain.len() {
        return Err(QsimError::RegisterDim {
            register: 0,
            expected: domain.len(),
            found: state.dims.first().copied().unwrap_or(0),
        });
    }
    check_domain(oracle.len(), domain)?;
    let x = oracle.quantum_payload();
    let stride: usize = state.dims[1..].iter().product();
    for pos in 0..domain.len() {
        if x.get(domain.get(pos)).expect("domain checked") == 1 {
            for a in &mut state.amps[pos * stride..(pos + 1) * stride] {
                *a = -*a;
            }
        }
    }
    state.debug_check_norm();
    Ok(())
}

/// Phase flip by an explicit predicate on register-0 coordinates. This is
/// the simulation primitive behind derived oracles (for example a gate that
/// marks k-subsets); the caller is responsible for charging the underlying
/// oracle for the queries such a gate would perform.
pub(crate) fn apply_phase_predicate(
    state: &mut StateVector,
    mut marked: impl FnMut(usize) -> bool,
) {
    let stride: usize = state.dims[1..].iter().product();
    for pos in 0..state.dims[0] {
        if marked(pos) {
            for a in &mut state.amps[pos * stride..(pos + 1) * stride] {
                *a = -*a;
            }
        }
    }
    state.debug_check_norm();
}

/// Inversion about the mean on register `reg`: within every slice fixing the
/// other registers, `a_i -> 2*mean - a_i`. Applied to register 0 of a
/// single-register state this is the usual diffusion operator
/// `2|u><u| - I` over a domain of arbitrary dimension.
pub fn apply_diffusion(state: &mut StateVector, reg: usize) {
    let (stride, dim) = state.stride_of(reg);
    let block = stride * dim;
    let n = state.amps.len();
    for base in (0..n).step_by(block) {
        for off in 0..stride {
            let mut mean = Complex64::new(0.0, 0.0);
            for c in 0..dim {
                mean += state.amps[base + off + c * stride];
            }
            mean /= dim as f64;
            for c in 0..dim {
                let a = &mut state.amps[base + off + c * stride];
                *a = 2.0 * mean - *a;
            }
        }
    }
    state.debug_check_norm();
}

/// Function-oracle gate `|x>|y> -> |x>|y XOR f(x)>` on a pair of
/// `2^width`-dimensional registers. One quantum query.
pub fn apply_function_oracle(
    state: &mut StateVector,
    oracle: &CountedOracle<FunctionTable>,
) -> Result<(), QsimError> {
    let d = oracle.domain_size();
    check_layout(state, &[d, d])?;
    let f = oracle.quantum_payload();
    let mut scratch = vec![Complex64::new(0.0, 0.0); state.amps.len()];
    for x in 0..d {
        let fx = f.eval(x as u64) as usize;
        for y in 0..d {
            scratch[x * d + (y ^ fx)] = state.amps[x * d + y];
        }
    }
    state.amps = scratch;
    state.debug_check_norm();
    Ok(())
}

/// Hadamard transform on every qubit of register `reg`; the register
/// dimension must be a power of two.
pub fn hadamard_register(state: &mut StateVector, reg: usize) -> Result<(), QsimError> {
    let (stride, dim) = state.stride_of(reg);
    if !dim.is_power_of_two() {
        return Err(QsimError::NotPowerOfTwo { register: reg, dim });
    }
    let block = stride * dim;
    let n = state.amps.len();
    let scale = 1.0 / (dim as f64).sqrt();
    // fast Walsh-Hadamard per slice, normalized once at the end
    for base in (0..n).step_by(block) {
        for off in 0..stride {
            let mut half = 1usize;
            while half < dim {
                let mut c = 0usize;
                while c < dim {
                    for j in c..c + half {
                        let lo = base + off + j * stride;
                        let hi = lo + half * stride;
                        let a = state.amps[lo];
                        let b = state.amps[hi];
                        state.amps[lo] = a + b;
                        state.amps[hi] = a - b;
                    }
                    c += 2 * half;
                }
                half *= 2;
            }
            for c in 0..dim {
                state.amps[base + off + c * stride] *= scale;
            }
        }
    }
    state.debug_check_norm();
    Ok(())
}

/// Born-rule measurement of register `reg`: samples an outcome, collapses
/// the state onto it and renormalizes. Returns the outcome.
pub fn measure(state: &mut StateVector, reg: usize, rng: &mut impl Rng) -> usize {
    let probs = state.marginal(reg);
    let total: f64 = probs.iter().sum();
    debug_assert!((total - 1.0).abs() < 1e-6, "unnormalized state: {total}");
    let mut draw = rng.gen_range(0.0..total);
    let mut outcome = probs.len() - 1;
    for (c, &p) in probs.iter().enumerate() {
        if draw < p {
            outcome = c;
            break;
        }
        draw -= p;
    }
    // collapse
    let (stride, dim) = state.stride_of(reg);
    let keep = probs[outcome].sqrt();
    for (i, a) in state.amps.iter_mut().enumerate() {
        if (i / stride) % dim == outcome {
            *a /= keep;
        } else {
            *a = Complex64::new(0.0, 0.0);
        }
    }
    state.debug_check_norm();
    outcome
}
