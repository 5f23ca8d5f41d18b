//! Exact tools for fractional coloring experiments: bitset graphs, graph
//! constructions, exact α/χ, an exact rational LP for χ_f, Hall ratios,
//! and big-integer up-arrow towers.

pub mod ackermann;
pub mod construct;
pub mod dimacs;
pub mod fraclp;
pub mod graph;
pub mod hall;
pub mod invariants;
pub mod rational;
pub mod rng;
pub mod verify;
pub mod vertex_set;

pub use graph::{Graph, GraphError};
pub use rational::Rational;
pub use vertex_set::VertexSet;
