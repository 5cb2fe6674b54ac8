//! Wired uniform spanning trees: loop-erased walks, Wilson's algorithm,
//! matrix-tree counting, the multiscale good algorithm and the coupling of a
//! domain tree with trees of a second domain around chosen points.

mod count;
mod coupling;
mod good;
mod lerw;
mod tree;
mod wilson;
mod wired;

use thiserror::Error;

pub use count::{
    edge_inclusion_probabilities, enumerate_wired_trees, spanning_tree_count, wired_tree_count, EdgeProbability,
    COUNT_LIMIT,
};
pub use coupling::{
    base_coupling, full_coupling, iterated_coupling, AttemptOutcome, AttemptRecord, CouplingParams, CouplingState,
    Event, FullCoupling, PointRecord, Stage, TranscriptLine,
};
pub use good::{cells_at_level, good_algorithm, good_algorithm_on, level_queue, GoodAlgorithmState, LevelRecord};
pub use lerw::{lerw, FirstHit, Lerw};
pub use tree::{verify_agreement, Branch, SpanningTree};
pub use wilson::{complete_tree, wilson_ust, wilson_ust_default, DEFAULT_STEP_CAP};
pub use wired::{Network, WiredGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UstError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("domain has no boundary vertex to wire")]
    NoRoot,
    #[error("vertex {vertex} cannot reach the wired boundary")]
    Unreachable { vertex: usize },
    #[error("walk from {start} exceeded the step cap {cap}")]
    CapExceeded { start: usize, cap: u64 },
    #[error("vertex order misses interior vertex {vertex}")]
    OrderIncomplete { vertex: usize },
    #[error("graph too large for exact counting: {size} > {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("stage {stage}: no vertex in the annulus at scale {scale}")]
    Vacuous { stage: &'static str, scale: f64 },
    #[error("{0}")]
    Domain(String),
}
