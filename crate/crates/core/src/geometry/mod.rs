//! Deterministic geometric diagnostics on embedded graphs: balls, boundaries,
//! isoperimetry, Poincaré constants, holes and chemical distances.

mod ball;
mod boundary;
mod holes;
mod iso;
mod paths;
mod poincare;

pub use ball::{graph_ball, inclusion_check, BallIndex, InclusionVerdict};
pub use boundary::{boundary_report, BoundaryReport, EulerData, SubsetView};
pub use holes::{cell_box, hole_analysis, HoleParams, HoleReport};
pub use iso::{for_each_connected_subset, isoperimetric_profile, IsoMode, IsoOptions, IsoReport, IsoRow};
pub use paths::{
    diameter_checks, red_path_bound, ContainmentIndex, ContainmentVerdict, DiameterReport, RedPath, Refusal,
};
pub use poincare::{poincare_constant, poincare_sides, GoodnessParams, PoincareReport};

use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("vertex set is empty")]
    EmptySet,
    #[error("vertex set is not connected")]
    Disconnected,
    #[error("vertex {0} is not in the ambient set")]
    NotInAmbient(VertexId),
    #[error(
        "exhaustive enumeration supports at most {cap} vertices per subset, got {requested}; use the heuristic mode"
    )]
    Mode { requested: usize, cap: usize },
    #[error("{size} vertices exceeds the dense eigen-solve limit of {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("eigen-solver did not converge (residual {residual:e})")]
    EigenFailure { residual: f64 },
}

/// Membership mask of `set` over `n` vertices.
pub(crate) fn mask_of(n: usize, set: &[VertexId]) -> Result<Vec<bool>, GeometryError> {
    let mut m = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(GeometryError::VertexOutOfRange(v));
        }
        m[v] = true;
    }
    Ok(m)
}
