//! Ordering constraint satisfaction at desk scale: permutation algebra,
//! alphabet coarsening, hypergraph expansion certificates, seeded hard
//! instance distributions, exact solvers, and the masked-vector
//! communication game with its streaming reduction.
//!
//! Everything that carries a value is an exact rational; randomness always
//! flows through caller-supplied seeded generators, so identical seeds give
//! byte-identical samples. All types are immutable after construction and
//! safe to share across threads.

pub mod coarsen;
pub mod dist;
pub mod error;
pub mod hypergraph;
pub mod instance;
pub mod irmd;
pub mod json;
pub mod perm;
pub mod predicate;
pub mod solve;
pub mod stats;

/// Exact values: numerator and denominator in machine integers.
pub type Rational = num_rational::Rational64;

pub use error::{Error, Result};
