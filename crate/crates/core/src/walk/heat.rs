use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geom::Rect;
use crate::graph::{EmbeddedGraph, VertexId};
use crate::rng::stream;
use crate::stats::BernoulliEstimate;

use super::WalkError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatKernelEstimate {
    pub times: Vec<f64>,
    /// Walks at `y` and not yet killed at each time.
    pub estimates: Vec<BernoulliEstimate>,
    /// `t · q̂_t`.
    pub scaled: Vec<f64>,
    /// `(c, n, holds)`: whether `t·q̂_t ≥ c` for every time in `[c n², n²/c]`;
    /// `holds` is `None` when no time falls in the window.
    pub window: Option<(f64, f64, Option<bool>)>,
}

/// Continuous-time unit-rate walk from `x`, killed on landing outside `rect`;
/// estimates the killed transition probability to `y` at each time.
#[allow(clippy::too_many_arguments)]
pub fn estimate_heat_kernel(
    g: &EmbeddedGraph,
    rect: &Rect,
    x: VertexId,
    y: VertexId,
    times: &[f64],
    trials: u64,
    seed: u64,
    window: Option<(f64, f64)>,
) -> Result<HeatKernelEstimate, WalkError> {
    for v in [x, y] {
        if v >= g.len() {
            return Err(WalkError::VertexOutOfRange(v));
        }
        if !rect.contains(g.pos(v)) {
            return Err(WalkError::InvalidParams(format!("vertex {v} is outside the rectangle")));
        }
    }
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(WalkError::InvalidParams("times must be non-negative".into()));
    }
    let inside: Vec<bool> = g.positions().iter().map(|&p| rect.contains(p)).collect();
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    const BLOCK: u64 = 4096;
    let blocks = trials.div_ceil(BLOCK);
    let counts = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b);
            let mut hits = vec![0u64; times.len()];
            let n = BLOCK.min(trials - b * BLOCK);
            for _ in 0..n {
                let mut v = x;
                let mut alive = true;
                let mut next: f64 = rng.sample(Exp1);
                for &k in &order {
                    while alive && next <= times[k] {
                        let nb = g.neighbors(v);
                        v = nb[rng.random_range(0..nb.len())];
                        alive = inside[v];
                        next += rng.sample::<f64, _>(Exp1);
                    }
                    if !alive {
                        break;
                    }
                    if v == y {
                        hits[k] += 1;
                    }
                }
            }
            hits
        })
        .reduce(|| vec![0u64; times.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    let estimates: Vec<BernoulliEstimate> = counts.iter().map(|&c| BernoulliEstimate::new(c, trials)).collect();
    let scaled: Vec<f64> = times.iter().zip(&estimates).map(|(t, e)| t * e.p_hat()).collect();
    let window = window.map(|(c, n)| {
        let (lo, hi) = (c * n * n, n * n / c);
        let inside: Vec<f64> =
            times.iter().zip(&scaled).filter(|(t, _)| **t >= lo && **t <= hi).map(|(_, s)| *s).collect();
        let holds = (!inside.is_empty()).then(|| inside.iter().all(|&s| s >= c));
        (c, n, holds)
    });
    Ok(HeatKernelEstimate { times: times.to_vec(), estimates, scaled, window })
}
