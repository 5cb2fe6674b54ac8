//! Simple random walks, the rectangle-crossing estimator, the exact
//! discrete-harmonic hitting solver, annulus circuits, heat-kernel estimates
//! and the Beurling escape experiment.

mod annulus;
mod beurling;
mod crossing;
mod heat;
mod hitting;
mod walker;

pub use annulus::{annulus_crossable, annulus_rectangles, AnnulusResult};
pub use beurling::{beurling_experiment, fit_power_law, BeurlingPoint};
pub use crossing::{
    estimate_crossing, evaluate_crossing, exact_crossing, CrossingEstimate, CrossingSpec, Estimator, Orientation,
    StartRow, Vacuity, Verdict,
};
pub use heat::{estimate_heat_kernel, HeatKernelEstimate};
pub use hitting::{solve_hitting_exact, HittingSolution, SolveMethod};
pub use walker::{run_walk, StopReason, StopRule, WalkGraph, WalkOutcome, WalkTrace};

use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Error, PartialEq)]
pub enum WalkError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("vertex {0} is in both the target and the kill set")]
    Overlap(VertexId),
    #[error(
        "singular system: free component of {size} vertices containing {vertex} touches neither target nor kill set"
    )]
    Singular { vertex: VertexId, size: usize },
    #[error("linear solve failed: harmonic residual {residual:e}")]
    SolverFailure { residual: f64 },
}
