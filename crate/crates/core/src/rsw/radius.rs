use serde::{Deserialize, Serialize};

use crate::geom::Point;
use crate::graph::EmbeddedGraph;
use crate::rng::derive_seed;
use crate::walk::{annulus_crossable, AnnulusResult, Estimator, Verdict};

use super::RswError;

/// One dyadic annulus `A(z, 2^i δ, 2^{i+1} δ)` of the ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    pub i: i32,
    pub scale: f64,
    pub annulus: AnnulusResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusResult {
    pub z: Point,
    pub delta: f64,
    pub c_mu: f64,
    pub confidence: f64,
    pub rungs: Vec<Rung>,
    /// Largest scale whose annulus fails the point verdict; 0 if none fails.
    pub r: f64,
    /// As `r`, with uncertain annuli counted as crossable.
    pub r_low: f64,
    /// As `r`, with uncertain annuli counted as failing.
    pub r_high: f64,
    pub all_vacuous: bool,
}

impl RadiusResult {
    /// Recomputes the radii from the stored estimates at another threshold.
    pub fn replay(&self, c_mu: f64) -> RadiusResult {
        let mut out = self.clone();
        out.c_mu = c_mu;
        let largest =
            |fails: &dyn Fn(&Rung) -> bool| self.rungs.iter().filter(|r| fails(r)).map(|r| r.scale).fold(0.0, f64::max);
        out.r = largest(&|r| !r.annulus.verdict(c_mu).is_crossable());
        out.r_low = largest(&|r| {
            matches!(r.annulus.interval_verdict(c_mu, self.confidence), Verdict::NotCrossable | Verdict::Vacuous(_))
        });
        out.r_high = largest(&|r| !r.annulus.interval_verdict(c_mu, self.confidence).is_crossable());
        out
    }
}

/// Largest dyadic scale `2^i δ`, `i_min ≤ i ≤ i_max`, whose annulus around `z`
/// is not crossable at rectangle threshold `c_mu`. The graph is taken to be
/// already scaled by `δ`; the whole ladder must fit inside `Λ_10`.
#[allow(clippy::too_many_arguments)]
pub fn compute_r_of_z(
    g: &EmbeddedGraph,
    z: Point,
    delta: f64,
    c_mu: f64,
    ladder: (i32, i32),
    estimator: Estimator,
    confidence: f64,
) -> Result<RadiusResult, RswError> {
    let (i_min, i_max) = ladder;
    if !(delta > 0.0) || i_min > i_max {
        return Err(RswError::Domain(format!("bad ladder {ladder:?} at delta {delta}")));
    }
    let top = 2f64.powi(i_max + 1) * delta;
    if z.x.abs().max(z.y.abs()) + top > 10.0 + 1e-12 {
        return Err(RswError::Domain(format!("ladder up to {top} around {z:?} leaves the box of half-side 10")));
    }
    let mut rungs = Vec::new();
    for i in i_min..=i_max {
        let scale = 2f64.powi(i) * delta;
        let est = match estimator {
            Estimator::MonteCarlo { trials, seed } => {
                Estimator::MonteCarlo { trials, seed: derive_seed(seed, i as u64) }
            }
            Estimator::Exact => Estimator::Exact,
        };
        let annulus = annulus_crossable(g, z, scale, 2.0 * scale, est)?;
        rungs.push(Rung { i, scale, annulus });
    }
    let all_vacuous = rungs.iter().all(|r| r.annulus.all_vacuous());
    let base = RadiusResult { z, delta, c_mu, confidence, rungs, r: 0.0, r_low: 0.0, r_high: 0.0, all_vacuous };
    Ok(base.replay(c_mu))
}

/// Radii over a set of points, with their maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RswRadii {
    pub delta: f64,
    pub c_mu: f64,
    pub points: Vec<RadiusResult>,
    pub r_max: f64,
    pub r_max_low: f64,
    pub r_max_high: f64,
    /// Evaluated points over points of `Λ_10 ∩ δℤ²`.
    pub coverage: f64,
}

/// Points of `Λ_10 ∩ (stride·δ)ℤ²` whose ladder fits in `Λ_10`.
pub fn subgrid(delta: f64, stride: usize, top_scale: f64) -> Vec<Point> {
    let h = delta * stride as f64;
    let lim = 10.0 - 2.0 * top_scale;
    if lim < 0.0 {
        return Vec::new();
    }
    let k = (lim / h + 1e-9).floor() as i64;
    let mut pts = Vec::new();
    for j in -k..=k {
        for i in -k..=k {
            pts.push(Point::new(i as f64 * h, j as f64 * h));
        }
    }
    pts
}

#[allow(clippy::too_many_arguments)]
pub fn rsw_radii(
    g: &EmbeddedGraph,
    points: &[Point],
    delta: f64,
    c_mu: f64,
    ladder: (i32, i32),
    estimator: Estimator,
    confidence: f64,
) -> Result<RswRadii, RswError> {
    let results = points
        .iter()
        .enumerate()
        .map(|(k, &z)| {
            let est = match estimator {
                Estimator::MonteCarlo { trials, seed } => {
                    Estimator::MonteCarlo { trials, seed: derive_seed(seed, k as u64) }
                }
                Estimator::Exact => Estimator::Exact,
            };
            compute_r_of_z(g, z, delta, c_mu, ladder, est, confidence)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let max = |f: fn(&RadiusResult) -> f64| results.iter().map(f).fold(0.0, f64::max);
    let full = (2.0 * (10.0 / delta).floor() + 1.0).powi(2);
    Ok(RswRadii {
        delta,
        c_mu,
        r_max: max(|r| r.r),
        r_max_low: max(|r| r.r_low),
        r_max_high: max(|r| r.r_high),
        coverage: results.len() as f64 / full,
        points: results,
    })
}
