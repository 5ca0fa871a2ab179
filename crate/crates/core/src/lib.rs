//! Periodic-box simulator for Kolmogorov's two-equation turbulence model
//! and its r-Laplacian regularization.
//!
//! The crate is organised bottom-up:
//!
//! * [`fields`]: periodic grids, sampled fields and the discrete operators
//!   (centered differences, conservative fluxes, r-Laplacian, Leray projection).
//! * [`model`]: closure parameters, comparison envelopes, exact homogeneous
//!   solutions and right-hand-side assembly.
//! * [`timestepper`]: SSP-RK2 with projection and an implicit Euler/Picard mode.
//! * [`diagnostics`]: energies, integral balances, bound monitors and decay fits.
//! * [`scaling`]: the scaling group of the model and numerical invariance checks.
//! * [`snapshot`]: the binary `KBOX` field snapshot format.

pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod model;
pub mod scaling;
pub mod snapshot;
pub mod timestepper;

pub use error::{Error, Result};
