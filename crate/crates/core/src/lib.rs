//! Exact distance oracle for single edge failures in undirected unweighted
//! graphs, for a set of sources `S` and every target vertex.
//!
//! The oracle stores `Õ(σ^{1/2} n^{3/2})` entries (σ = |S|) and answers a
//! query `Q(s, t, e)` (the `s`–`t` distance once edge `e` is deleted) with a
//! polylogarithmic number of table probes. The crate is `no_std` + `alloc`;
//! parsing, serialization and the command line live in the companion crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod dist;
pub mod fixtures;
pub mod gen;
pub mod graph;
pub mod oracle;
pub mod perturb;
pub mod query;
pub mod replacement;
pub mod verify;

mod par;

pub use dist::{Dist, PLen};
pub use graph::{EdgeId, Graph, GraphError, Vertex};
pub use oracle::{build_oracle, BuildError, Oracle, OracleParams};
pub use perturb::{perturb, sssp, verify_unique_shortest_paths, Perturbation, SpTree};
pub use query::{EdgePosition, Provenance, QueryAnswer, QueryError};

/// Sentinel for "no vertex" / "no edge" in dense `u32` tables.
pub const NONE: u32 = u32::MAX;
