//! Chern–Simons formulation of three-dimensional gravity: Lie algebra
//! primitives, jet-valued differential forms, gauge transformations, the
//! gravitational correspondence, and a lattice variational solver.

pub mod algebra;
pub mod error;
pub mod gauge;
pub mod gravity;
pub mod jetfields;
pub mod sampling;
pub mod varsolver;

pub use error::{Error, Result};
