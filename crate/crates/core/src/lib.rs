//! Exact and modular q-series arithmetic for partition-type generating
//! functions, with incongruence sieves, congruence scanning and a coefficient
//! cache.

pub mod arith;
pub mod error;
pub mod generators;
pub mod scanner;
pub mod series;
pub mod sieve;
pub mod store;

pub use error::{Error, Result};
pub use generators::{FamilyKind, FamilySpec};
pub use series::{Coeffs, Progression, TruncatedSeries};
