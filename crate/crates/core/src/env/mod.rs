//! Random planar environments: percolation clusters, Poisson–Delaunay
//! triangulations, the square lattice, and coarse-grained red-box fields.

mod coarse;
mod delaunay;
mod lattice;
mod percolation;

pub use coarse::{coarse_grain_in, coarse_grain_red_boxes, CellState, CoarseField};
pub use delaunay::{delaunay_of_points, generate_poisson_delaunay, sample_poisson_points, PoissonParams};
pub use lattice::generate_square_lattice;
pub use percolation::{generate_percolation_cluster, PercolationCluster, PercolationParams};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EnvError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("p = {p} is not supercritical (requires p > 1/2)")]
    NotSupercritical { p: f64 },
    #[error("subcritical-like sample: largest cluster has {size} vertices")]
    SubcriticalLike { size: usize },
    #[error("degenerate point set: {count} points")]
    DegeneratePointSet { count: usize },
}
