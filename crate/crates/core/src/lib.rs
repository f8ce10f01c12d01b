//! Aharonov-Bohm interference behind two solenoids whose flux is sourced by
//! a single internal electron in a superposition of two wires.
//!
//! The crate is split along the physics:
//!
//! - [`physics`]: constants, apparatus geometry, single-solenoid phase and
//!   fringe-shift relations.
//! - [`dual`]: two solenoids, either energized together (fluxes add) or fed
//!   by a superposed internal electron (two-point outcome distribution).
//! - [`current`]: internal-electron wavefunctions on a grid and the current
//!   they carry, including the mixture decomposition of that current.
//! - [`pattern`], [`sampling`], [`experiment`]: screen patterns, shift and
//!   visibility estimation, and the seeded Monte Carlo detection run.

pub mod current;
pub mod dual;
pub mod error;
pub mod experiment;
pub mod pattern;
pub mod physics;
pub mod sampling;

pub use error::{Error, Result};
