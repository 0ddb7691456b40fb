//! Rewriting engine for finite directed multigraphs and open graphs.
//!
//! The crate is organized around a handful of small, immutable values:
//! graphs and their homomorphisms ([`graph`]), pushouts and pushout
//! complements ([`colimit`]), open graphs as structured cospans
//! ([`cospan`]), double-pushout rules and bounded rewrite search
//! ([`dpo`]), squares of open-graph rewrites and their two compositions
//! ([`double`]), grammar discretization ([`discrete`]), and randomized
//! theorem-checking suites ([`oracle`]). Everything is deterministic:
//! identical inputs and seeds produce identical outputs.

pub mod canon;
pub mod colimit;
pub mod cospan;
pub mod discrete;
pub mod dot;
pub mod double;
pub mod dpo;
pub mod error;
pub mod graph;
pub mod json;
pub mod oracle;

pub use error::Error;
pub use graph::{Graph, GraphHom, NodeId, EdgeId, Subgraph};
