//! Exact symbolic engine for invariant differential operators on flat
//! coadjoint orbits of nilpotent Lie groups.
//!
//! Everything here is rational arithmetic: structure constants, the
//! Baker–Campbell–Hausdorff group law, the orbit cocycle `χ` and its inverse,
//! the fundamental vector fields of the affine coadjoint action, and the
//! first-order commutant that spans the invariant operators.
//!
//! The crate is `no_std` with `alloc`; enable `std` for `std::error::Error`
//! integration through `thiserror`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod diffop;
pub mod format;
pub mod group;
pub mod heisenberg;
pub mod invariant;
pub mod lie;
pub mod matrix;
pub mod orbit;
pub mod poly;
pub mod rational;

pub use diffop::DiffOp;
pub use group::GroupLaw;
pub use invariant::OpBasis;
pub use lie::{LieAlgebra, Subspace, ValidationReport};
pub use matrix::{Matrix, PolyMatrix, RatMatrix};
pub use orbit::OrbitData;
pub use poly::{Monomial, MultiPoly, PolyMap};
pub use rational::Rational;
