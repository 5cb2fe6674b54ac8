use serde::{Deserialize, Serialize};

use crate::geom::Rect;
use crate::graph::{EmbeddedGraph, VertexId};

use super::walker::{WalkGraph, WalkOutcome, FREE, KILL, TARGET};
use super::{solve_hitting_exact, Estimator, WalkError};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeurlingPoint {
    /// `d(v, K) / d(v, ∂D)`.
    pub ratio: f64,
    pub dist_k: f64,
    pub dist_boundary: f64,
    /// Probability of leaving `Λ_{d(v,∂D)}(v)` before hitting `K`.
    pub escape: f64,
    pub successes: u64,
    pub trials: u64,
    pub exact: bool,
}

/// Escape probability from `v` past the box of radius `d(v, ∂D)` before hitting `K`.
pub fn beurling_experiment(
    g: &EmbeddedGraph,
    v: VertexId,
    k: &[VertexId],
    d: &Rect,
    estimator: Estimator,
) -> Result<BeurlingPoint, WalkError> {
    if v >= g.len() {
        return Err(WalkError::VertexOutOfRange(v));
    }
    if let Some(&w) = k.iter().find(|&&w| w >= g.len()) {
        return Err(WalkError::VertexOutOfRange(w));
    }
    if k.contains(&v) {
        return Err(WalkError::InvalidParams(format!("start vertex {v} lies in K")));
    }
    let p = g.pos(v);
    let dist_boundary = d.dist_to_boundary(p);
    let dist_k = k.iter().map(|&w| g.pos(w).dist(p)).fold(f64::INFINITY, f64::min);
    let bx = Rect::square(p, dist_boundary);
    let mut in_k = vec![false; g.len()];
    for &w in k {
        in_k[w] = true;
    }
    let status: Vec<u8> = (0..g.len())
        .map(|w| {
            if in_k[w] {
                KILL
            } else if !bx.contains(g.pos(w)) {
                TARGET
            } else {
                FREE
            }
        })
        .collect();
    let ratio = dist_k / dist_boundary;
    match estimator {
        Estimator::Exact => {
            let target: Vec<bool> = status.iter().map(|&s| s == TARGET).collect();
            let sol = solve_hitting_exact(g, &target, &in_k)?;
            Ok(BeurlingPoint { ratio, dist_k, dist_boundary, escape: sol.h[v], successes: 0, trials: 0, exact: true })
        }
        Estimator::MonteCarlo { trials, seed } => {
            let wg = WalkGraph::new(g, status);
            let mut rng = rng_from_seed(seed);
            let reachable = wg.reach(v).0;
            let mut successes = 0;
            if reachable {
                for _ in 0..trials {
                    if wg.run(v, &mut rng, 1 << 34) == WalkOutcome::Target {
                        successes += 1;
                    }
                }
            }
            let escape = successes as f64 / trials as f64;
            Ok(BeurlingPoint { ratio, dist_k, dist_boundary, escape, successes, trials, exact: false })
        }
    }
}

/// Least-squares fit of `escape ≈ c · ratio^{c'}` in log-log coordinates over
/// points with positive escape and ratio. Returns `(c, c')`.
pub fn fit_power_law(points: &[BeurlingPoint]) -> Option<(f64, f64)> {
    let xy: Vec<(f64, f64)> =
        points.iter().filter(|p| p.escape > 0.0 && p.ratio > 0.0).map(|p| (p.ratio.ln(), p.escape.ln())).collect();
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let (mx, my) = (xy.iter().map(|p| p.0).sum::<f64>() / n, xy.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    Some(((my - slope * mx).exp(), slope))
}
