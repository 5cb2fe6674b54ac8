use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{
    generate_percolation_cluster, generate_poisson_delaunay, generate_square_lattice, PercolationParams, PoissonParams,
};
use crate::geom::{Point, Rect};
use crate::graph::EmbeddedGraph;
use crate::rng::{derive_path, derive_seed};
use crate::stats::wilson_interval;
use crate::walk::{evaluate_crossing, exact_crossing, CrossingSpec, Estimator, Orientation};

use super::RswError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EnvSpec {
    Percolation { p: f64 },
    Voronoi { lambda: f64 },
    Lattice,
}

impl EnvSpec {
    pub fn label(&self) -> &'static str {
        match self {
            EnvSpec::Percolation { .. } => "perc",
            EnvSpec::Voronoi { .. } => "voronoi",
            EnvSpec::Lattice => "lattice",
        }
    }
}

/// An environment covering `Λ_half` around the origin.
pub fn build_environment(env: &EnvSpec, half: usize, seed: u64) -> Result<EmbeddedGraph, RswError> {
    let bx = Rect::square(Point::ORIGIN, half as f64);
    Ok(match *env {
        EnvSpec::Percolation { p } => {
            generate_percolation_cluster(&PercolationParams::supercritical(p, half), seed)?.graph
        }
        EnvSpec::Voronoi { lambda } => generate_poisson_delaunay(&PoissonParams::new(lambda, bx), seed)?,
        EnvSpec::Lattice => generate_square_lattice(bx, 1.0)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n: usize,
    pub env_seeds: u64,
    pub failures: u64,
    pub p_fail: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl CurveRow {
    pub fn csv_header() -> &'static str {
        "n,env_seeds,failures,p_fail,ci_low,ci_high"
    }

    pub fn csv(&self) -> String {
        format!("{},{},{},{},{},{}", self.n, self.env_seeds, self.failures, self.p_fail, self.ci_low, self.ci_high)
    }

    /// Binomial standard error of `p_fail`.
    pub fn sigma(&self) -> f64 {
        (self.p_fail * (1.0 - self.p_fail) / self.env_seeds as f64).sqrt()
    }
}

/// For each `n`, the fraction of environments in which `Λ_{3n,n}` is not
/// `c`-crossable. Environments cover `Λ_{4n}`; a vacuous rectangle counts as
/// a failure. Monte Carlo estimators get a per-environment derived seed.
pub fn crossing_curve(
    env: &EnvSpec,
    ladder: &[usize],
    c: f64,
    env_seeds: u64,
    master_seed: u64,
    estimator: Estimator,
    confidence: f64,
) -> Result<Vec<CurveRow>, RswError> {
    ladder
        .iter()
        .map(|&n| {
            let spec = CrossingSpec::standard(Point::ORIGIN, n as f64, Orientation::East);
            let fails = (0..env_seeds)
                .into_par_iter()
                .map(|k| -> Result<u64, RswError> {
                    let seed = derive_path(master_seed, &[n as u64, k]);
                    let g = build_environment(env, 4 * n, seed)?;
                    let est = match estimator {
                        Estimator::MonteCarlo { trials, .. } => {
                            Estimator::MonteCarlo { trials, seed: derive_seed(seed, 1) }
                        }
                        Estimator::Exact => Estimator::Exact,
                    };
                    let ce = evaluate_crossing(&g, &spec, est)?;
                    Ok(u64::from(!ce.verdict(c).is_crossable()))
                })
                .collect::<Result<Vec<u64>, _>>()?;
            let failures: u64 = fails.iter().sum();
            let (ci_low, ci_high) = wilson_interval(failures, env_seeds, confidence);
            let p_fail = if env_seeds == 0 { 0.0 } else { failures as f64 / env_seeds as f64 };
            Ok(CurveRow { n, env_seeds, failures, p_fail, ci_low, ci_high })
        })
        .collect()
}

/// Exact crossing constant of `Λ_{3m,m}` on the unit square lattice.
pub fn lattice_crossing_constant(m: usize) -> f64 {
    let g = generate_square_lattice(Rect::square(Point::ORIGIN, 4.0 * m as f64), 1.0).expect("valid box");
    let spec = CrossingSpec::standard(Point::ORIGIN, m as f64, Orientation::East);
    exact_crossing(&g, &spec).expect("lattice solve").min().expect("nonempty start square").0
}
