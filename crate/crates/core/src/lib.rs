//! Simulation library for a preferential-attachment multigraph process
//! whose vertex-vs-edge schedule is a time-dependent probability `f` (the
//! edge-step function), together with bootstrap percolation on the
//! resulting graphs and a Monte Carlo harness that verifies the structural
//! and spreading properties the model is known for: the degree martingale,
//! the early-vertex maximum-degree bound, the star/hub/susceptible witness
//! structure, and the three-round outbreak.
//!
//! The crate is organized as:
//!
//! * [`edgestep`] — schedule families and their regularity metadata;
//! * [`normalizer`] — the martingale normalizers `phi` and `xi`;
//! * [`conditions`] — summability condition verdicts;
//! * [`graph`] — the multigraph with O(1) degree-proportional sampling;
//! * [`generator`] — the sequential process and one-step resampling;
//! * [`percolation`] — threshold bootstrap percolation;
//! * [`certificates`] — the structural witnesses and their thresholds;
//! * [`experiments`] — replica orchestration with reproducible seeds.

pub mod certificates;
pub mod conditions;
pub mod edgestep;
pub mod error;
pub mod experiments;
pub mod generator;
pub mod graph;
pub mod normalizer;
pub mod percolation;
pub mod seeds;
pub mod stats;

pub use edgestep::{EdgeStepFunction, RateSequence, StepIndexConvention};
pub use error::{Error, Result};
pub use graph::{Adjacency, Multigraph, VertexId};
pub use normalizer::NormalizerTable;
