//! Crosstalk-aware time-slice and mode scheduling for multi-mode fiber
//! datacenter networks.
//!
//! An [`model::Instance`] describes the network, the frame grid and the
//! requests. [`solve`] produces a [`solve::Schedule`], [`validate`] checks
//! one independently, [`milp`] writes the full integer model for external
//! solvers and [`harness`] runs seeded load sweeps.

pub mod decimal;
pub mod error;
pub mod harness;
pub mod milp;
pub mod model;
pub mod solve;
pub mod timeline;
pub mod validate;
pub mod xtalk;

pub use error::{Error, Result};
