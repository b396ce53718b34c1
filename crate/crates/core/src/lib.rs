//! Bound Bethe-ansatz states of repulsive bosons in a one-dimensional finite
//! square-well trap, and the trap capacities, ionization thresholds,
//! excitation gaps, and adiabatic culling times derived from them.
//!
//! Layers, bottom up:
//!
//! - [`units`]: SI ↔ trap units, the effective 1D coupling
//! - [`secular`]: secular equations, Tonks-limit roots, continuation solver
//! - [`spectrum`]: ground / first-excited states and their gap
//! - [`capacity`]: trap capacity and ionization thresholds
//! - [`sweep`]: parameter grids with CSV / JSON-lines output
//! - [`adiabatic`]: minimum culling time along a depth ramp
//! - [`oracles`]: independent reference computations
//! - [`config`], [`cli`]: file formats and the command-line tool

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adiabatic;
pub mod capacity;
pub mod cli;
pub mod config;
pub mod oracles;
pub mod secular;
pub mod spectrum;
pub mod sweep;
pub mod units;
