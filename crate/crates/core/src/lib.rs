//! Simulation kernels for random-walk crossing estimates on random planar
//! graphs, uniform spanning tree couplings, and dimer height diagnostics.

pub mod dimer;
pub mod env;
pub mod geom;
pub mod geometry;
pub mod graph;
pub mod graph_io;
pub mod planar;
pub mod rng;
pub mod rsw;
pub mod stats;
pub mod ust;
pub mod walk;

pub use geom::{Point, Rect};
pub use graph::{EmbeddedGraph, GraphError, VertexId};
