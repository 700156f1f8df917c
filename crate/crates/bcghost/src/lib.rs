//! Exact computations for the charged free-fermion (bc ghost, spin 0) theory.
//!
//! The crate is `no_std` and only needs `alloc`. Every number is an exact
//! rational; every container is ordered so that results are deterministic.
//!
//! Layout, bottom up:
//! - [`maya`]: half-integers, Maya diagrams, reflection and shift.
//! - [`fock`]: Fock vectors, dual functionals, fermion/current/Virasoro actions.
//! - [`laurent`]: truncated Laurent series, composition, Schwarzian.
//! - [`curve`]: marked rational curves, nodal gluings, global functions and forms.
//! - [`vacua`]: gauge conditions, vacuum solving, propagation, the nodal isomorphism.
//! - [`sewing`]: the braced pairings, dual bases and the sewing q-series.
//! - [`coordchange`]: coordinate changes, their Fock lift and preferred elements.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod coordchange;
pub mod curve;
mod error;
pub mod fock;
pub mod laurent;
pub mod linalg;
pub mod maya;
pub mod poly;
pub mod rational;
pub mod sewing;
pub mod vacua;

pub use error::Error;

pub type Result<T> = core::result::Result<T, Error>;
