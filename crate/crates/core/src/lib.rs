//! Bipartite configuration model for random hypergraphs: degree laws,
//! incidence graphs, sampling, subgraph counts, the local-limit branching
//! process and first-order sentences over incidence structures.

pub mod bgw;
pub mod census;
pub mod degree_model;
pub mod error;
pub mod experiment;
pub mod incidence;
pub mod logic;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
