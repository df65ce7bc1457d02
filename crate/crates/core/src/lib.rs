//! Tests whether a discrete joint distribution can arise from independent
//! mechanisms arranged along a directed hypergraph.
//!
//! Start with [`dist::JointDistribution`] and [`hypergraph::DirectedHypergraph`],
//! then score with [`scoring::idef`] and [`scoring::siminc`], or ask
//! [`compat::decide_general`] for a verdict.

pub mod causal;
pub mod cli;
pub mod compat;
pub mod corpus;
pub mod dist;
pub mod error;
pub mod graph;
pub mod hypergraph;
pub mod info;
pub mod scoring;

pub use error::{Error, Result};
