//! Exact arithmetic for the shifted Fermat sequence `a_n = 2^(2^n) + d`.
//!
//! Terms grow doubly exponentially, so almost everything here works through
//! residues: `term_mod` reaches `a_n mod M` by `n` squarings, and pair gcds are
//! taken against the smaller term only. On top of that sit constructive,
//! self-checking versions of the divisibility lemmas (exponent lift, forced
//! common divisor, divisor chain for `d = 2^t`) and a witness search that,
//! for any `d > 1` and bound `m`, produces a certified pair `(k, l)` with
//! `gcd(a_k, a_l) > m`.
//!
//! Indices are zero-based: `a_0 = 2 + d`.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod arith;
mod error;
pub mod lemma;
pub mod search;
pub mod sequence;

pub use arith::{Factorization, Natural, Primality, Valuation};
pub use error::{Error, Result};
pub use lemma::{
    check_certificate, Certificate, CommonDivisorWitness, DivisorChainWitness, Lift, LiftMode,
};
pub use search::{
    find_witness, OrbitProfile, ReportCertificate, Route, ScanEntry, ScanTable, SearchConfig,
    WitnessReport,
};
pub use sequence::{SequenceSpec, TermDecomposition, DEFAULT_BIT_CAP};

/// Position in the sequence. Zero-based.
pub type Index = u64;
