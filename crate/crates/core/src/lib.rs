//! Approximate minimum weight cycle computation in a simulated CONGEST network.
//!
//! Layers, bottom up: [`graph`] and [`cycles`] (exact oracles), [`scaling`],
//! [`congest`] (round engine and cost ledger), [`ldd`] (low diameter
//! decomposition), [`hop_sssp`] (BFS-based hop-bounded distances), [`mwc`]
//! (the two-regime approximation) and [`hard`] (lower-bound instances).

pub mod congest;
pub mod cycles;
pub mod graph;
pub mod hard;
pub mod hop_sssp;
pub mod ldd;
pub mod mwc;
pub mod scaling;
