//! Threshold-based multi-trial (GMD) decoding of binary concatenated codes:
//! optimal erasing thresholds, analytic residual-error predictions, exact
//! combinatorial enumeration, and Monte Carlo simulation.
//!
//! The concatenated system pairs a binary inner code, decoded by exhaustive
//! maximum likelihood with a per-block reliability value, with an outer
//! Reed–Solomon code decoded by an error/erasure decoder whose radius is
//! (l+1)/l * errors + erasures <= d - 1. A set of increasing reliability
//! thresholds drives one erasure pattern per decoding trial; this crate
//! computes the threshold locations that minimize the residual codeword
//! error probability, three independent ways, and cross-validates them
//! against exact enumeration and simulation.

pub mod enumeration;
pub mod error;
pub mod exponent;
pub mod field;
pub mod gf2;
pub mod inner;
pub mod outer;
pub mod scalar;
pub mod sim;
pub mod threshold;

pub use error::{Error, Result};

/// Default floating-point scalar used by the analysis front ends.
pub type Real = f64;

/// Exact scalar for the rational lanes (condition solver, radius checks,
/// error-probability coefficients).
pub type Rational = num::BigRational;
