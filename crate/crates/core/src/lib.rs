//! Query-model laboratory for pseudo-deterministic quantum and classical
//! search algorithms.
//!
//! Everything here runs against an oracle: an algorithm never sees its input
//! directly, it pays for every bit (or function value) it looks at, and the
//! library keeps exact classical/quantum query counts. On top of that sit
//! small dense-statevector simulations of the standard quantum search
//! circuits, a set of benchmark search problems, algorithms engineered to
//! return a *canonical* answer with probability at least 2/3 (pseudo-
//! determinism), and a Monte Carlo harness that certifies those properties
//! from seeded trials.
//!
//! Module map:
//!
//! * [`oracle`] - counted oracle access to bit strings, function tables and
//!   value sequences; index sets and restrictions.
//! * [`qsim`] - dense statevector simulation with oracle gates, diffusion,
//!   Hadamard layers and Born-rule measurement.
//! * [`grover`] - amplitude amplification with known and unknown numbers of
//!   marked items, with fixed worst-case query budgets.
//! * [`simon`] - hidden-XOR-shift recovery from orthogonal samples, plus the
//!   classical birthday-collision baseline.
//! * [`problems`] - benchmark problems: parity-block avoidance, Hamming
//!   weight estimation, weight-encoded shift recovery, k-subset search
//!   families, and uniform-support minimum finding.
//! * [`psd`] - pseudo-deterministic constructions: first-marked-index search,
//!   the greedy canonical k-subset finder, and majority amplification.
//! * [`reductions`] - randomized reductions that transfer solvers between
//!   problems while preserving query budgets and canonicity.
//! * [`harness`] - seeded experiment runner: pseudo-determinism and
//!   canonization verdicts, query-scaling fits, JSON/CSV reports.

pub mod grover;
pub mod harness;
pub mod oracle;
pub mod problems;
pub mod psd;
pub mod qsim;
pub mod reductions;
pub mod seeds;
pub mod simon;

pub use oracle::{BitString, CountedOracle, FunctionTable, IndexSet, OracleError, ValueSeq};
pub use seeds::TrialRng;
