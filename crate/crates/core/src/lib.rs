//! Exact lattice calculus for K3 surfaces with symplectic automorphisms.
//!
//! Integer and rational arithmetic throughout; no floating point enters any verdict.

pub mod arith;
pub mod atlas;
pub mod compare;
pub mod discriminant;
pub mod enumerate;
pub mod error;
pub mod expr;
pub mod k3;
pub mod lattice;
pub mod matrix;
pub mod normal_form;
pub mod order3;
pub mod poly;
pub mod weierstrass;
pub mod fibration;
pub mod specialize;
pub mod overlattice;
pub mod props;
pub mod sublattice;
pub mod verify;

pub use error::{LatticeError, Result};
