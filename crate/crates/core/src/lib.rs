//! Monte Carlo PageRank kept up to date under edge arrivals.
//!
//! Each node stores `R` random walks with geometric budgets. When an edge
//! `(u, v)` arrives, every walk passing through `u` with budget left is
//! redirected through the new edge with probability `1/d(u)`, keeping its
//! length. [`adversary`] builds tree-shaped graphs whose edge order makes
//! this maintenance cost grow polynomially in the number of edges, and
//! [`experiment`] measures that growth.

pub mod adversary;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod pagerank;
pub mod rng;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{DynGraph, NodeId};
pub use rng::RngStream;
pub use walk::{UpdateStats, Walk, WalkStore};
