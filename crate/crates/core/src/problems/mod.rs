//! Benchmark search problems.
pub mod aoes;
pub mod hamming;
pub mod simon_hamming;
pub mod subset;
pub mod suppfind;
