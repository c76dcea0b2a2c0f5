//! Exact rational computations for Sullivan models, finite-dimensional
//! cohomology rings, derivations and Taylor expansions of automorphisms
//! of `A ⊗ H^*(T^d)`.

pub mod catalog;
pub mod derivation;
pub mod dga;
mod error;
pub mod fd;
pub mod gca;
pub mod linalg;
pub mod report;
pub mod taylor;
pub mod dsl;

pub use error::{Error, Result};

/// Rational scalars.
pub type Q = num_rational::BigRational;
