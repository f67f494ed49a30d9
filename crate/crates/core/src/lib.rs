//! Uniform Lefschetz classes on Galois coverings of closed manifolds.
//!
//! The crate computes the class of a self-map (or the index class of a vector
//! field) as a bounded function on the deck group, and decides whether it
//! vanishes in the coinvariants `l^inf(G)_G` with a re-checkable certificate.

#![allow(clippy::needless_range_loop)]

pub mod chain;
pub mod class_fn;
pub mod cli;
pub mod complex;
pub mod error;
pub mod expr;
pub mod fixpoint;
pub mod group;
pub mod ufh;
pub mod vectorfield;

pub use class_fn::ClassFunction;
pub use error::{Error, Result};
pub use group::{Elem, MarkedGroup};

use num_bigint::BigInt;

/// Exact rationals.
pub type Q = num_rational::BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}
