//! Torsion index computations for the spin, special orthogonal, projective
//! orthogonal and half-spin groups, built on exact arithmetic in the Chow ring
//! of the D_n two-step flag variety.

pub mod arith;
pub mod chowring;
pub mod decomp;
pub mod error;
pub mod generators;
pub mod sublattice;
pub mod torsion;
pub mod verify;

pub use arith::Valuation;
pub use chowring::{Monomial, RingContext, RingElement};
pub use error::{Error, Result};
