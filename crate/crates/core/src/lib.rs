//! Random Euclidean combinatorial optimization with p-costs.
//!
//! Exact bipartite matching, 2-opt-stable monopartite and alternating
//! bipartite tours, verifiers for the 2-opt and local edge-to-energy
//! inequalities, the mesoscopic density event, and a seeded Monte Carlo
//! harness measuring how p-optimal structures behave under q-costs.

// `!(x > t)` comparisons are kept on purpose: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod btsp;
pub mod cli;
pub mod energy;
pub mod experiments;
pub mod error;
pub mod geometry;
pub mod lap;
pub mod matching;
pub mod plot;
pub mod tsp;

pub use error::{Error, Result};
