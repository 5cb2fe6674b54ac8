//! Temperleyan superposition graphs, winding heights of wired USTs and their
//! moment diagnostics.

mod height;
mod moments;
mod temperley;
mod winding;

use thiserror::Error;

pub use height::{height_ensemble, height_from_ust, sample_height_field, HeightField};
pub use moments::{estimate_height_moments, gff_target_variance, GffTarget, MomentReport, TestFunction, TwoMeshRow};
pub use temperley::{build_temperleyan, unit_square_lattice, TemperleyanGraph};
pub use winding::{turn_angle, winding_of_path};

use crate::ust::UstError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DimerError {
    #[error("graph must be connected with at least one edge")]
    Degenerate,
    #[error("boundary cycle is not simple: vertex {vertex} appears twice")]
    Pinch { vertex: usize },
    #[error("path needs at least 2 vertices, got {0}")]
    ShortPath(usize),
    #[error("zero-length segment at index {index}")]
    ZeroLength { index: usize },
    #[error("vertex {0} is not on the boundary cycle")]
    NotOnBoundary(usize),
    #[error("tree does not cover interior vertex {0}")]
    TreeIncomplete(usize),
    #[error("ensemble of {got} fields is below the minimum {min}")]
    EnsembleTooSmall { got: usize, min: usize },
    #[error("test function support leaves the domain")]
    SupportOutside,
    #[error("fields were built on different graphs")]
    Mismatch,
    #[error(transparent)]
    Ust(#[from] UstError),
}
