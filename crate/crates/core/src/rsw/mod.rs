//! Scale machinery: the cutoff radius formula, the dyadic non-crossability
//! radius around a point, crossing-failure curves over environment ensembles,
//! and stretched-exponential tail fits.

mod curve;
mod fit;
mod r0;
mod radius;

pub use curve::{build_environment, crossing_curve, lattice_crossing_constant, CurveRow, EnvSpec};
pub use fit::{fit_stretched_exponential, TailFit};
pub use r0::compute_r0;
pub use radius::{compute_r_of_z, rsw_radii, subgrid, RadiusResult, RswRadii, Rung};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RswError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("underdetermined fit: {informative} informative rows, need at least 3")]
    Underdetermined { informative: usize },
    #[error(transparent)]
    Walk(#[from] crate::walk::WalkError),
    #[error(transparent)]
    Env(#[from] crate::env::EnvError),
}
