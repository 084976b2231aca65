//! Generalized Legendre factorials over Q and quadratic fields.
//!
//! The crate enumerates prime ideals, computes the factorial ideals `n!_{K,f}` with their
//! increments and summatory function, evaluates the associated Dirichlet series near its
//! double pole at `s = 1`, and checks the `x log x / c + C x` asymptotic numerically.

// Negated float comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod complex;
pub mod config;
pub mod dirichlet;

pub mod error;
pub mod factorial;
pub mod field;
pub mod format;
pub mod sieve;
pub mod sum;
pub mod zeta;

pub use error::{Error, Result};
pub use factorial::{
    factorial_ideal, increment, increments_upto, log_norm_of_ideal, parse_fspec, summatory,
    valuation, ExponentIdeal, FSpec, IncrementTable, Shape,
};
pub use field::{
    kronecker_symbol, prime_ideal_stream, Exclusion, FieldKind, FieldSpec, PrimeIdeal, SEntry,
    SSet, SplittingType,
};
pub use sieve::rational_primes;
