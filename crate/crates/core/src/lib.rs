//! Numerical engine for toric plurisubharmonic geodesics on the unit polydisk.
//!
//! Toric psh functions on `D^n` are handled through their convex images on
//! the negative orthant, sampled on uniform grids. On top of the Legendre
//! calculus in [`grid`] the crate builds relative extremal functions of
//! Reinhardt bodies, discrete Monge-Ampere measures, capacities and
//! energies, geodesics, rooftop envelopes and residual functions.

pub mod bodies;
pub mod error;
pub mod extremal;
pub mod geodesics;
pub mod grid;
pub mod harness;
pub mod monge_ampere;
pub mod parallel;
pub mod rooftop;

pub use bodies::ConvexBody;
pub use error::{Error, Result};
pub use grid::{DualGridFn, DualGridSpec, GridFn, GridSpec, Tail, TOP};
