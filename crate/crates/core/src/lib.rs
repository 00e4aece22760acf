//! Computable core of geometric quantization on Abelian Lie supergroups
//! `G = T_n × ℝ^m × ⋀_k`.
//!
//! * [`grassmann`]: exact Grassmann/Berezin calculus.
//! * [`potential`]: expression DSL and second-order forward-mode AD for
//!   strictly convex potentials.
//! * [`kahler`]: the invariant super Kähler form built from a potential, its
//!   axiom checks and the moment map.
//! * [`bergman`]: convergence of weighted norms and the two occurrence
//!   oracles.
//! * [`reps`]: irreducible unitary labels, characters, occurrence reports and
//!   finite-dimensional super-unitarity checks.

pub mod error;
pub mod bergman;
pub mod grassmann;
pub mod kahler;
pub mod potential;
pub mod reps;
pub mod selftest;

pub use error::{Error, Result};
