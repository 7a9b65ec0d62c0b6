//! Quantum correlations beyond entanglement for finite-dimensional systems.
//!
//! Density operators and their reductions live in [`qstate`], entropies in
//! [`entropy`], local measurements in [`measurement`]. [`correlations`] builds
//! discord, one-way deficit and classicality tests on top of those, using the
//! grid-plus-simplex search in [`optimize`]. [`states`] holds the worked
//! example states and [`protocols`] the BB84 and decoding-game simulations.

pub mod correlations;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod optimize;
pub mod protocols;
pub mod qstate;
pub mod states;

pub use error::{Error, Result};
pub use optimize::{OptimizationReport, OptimizerConfig};
pub use qstate::{DensityOperator, Ensemble, Ket};
