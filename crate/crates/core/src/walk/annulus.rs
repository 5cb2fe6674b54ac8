use serde::{Deserialize, Serialize};

use crate::geom::Point;
use crate::graph::EmbeddedGraph;
use crate::rng::derive_seed;

use super::{evaluate_crossing, CrossingEstimate, CrossingSpec, Estimator, Orientation, Vacuity, Verdict, WalkError};

/// Four rectangles of half-sides `n × (n−m)/2` whose union is `Λ_n(z) \ Λ_m(z)`
/// (open inner square), oriented counterclockwise.
pub fn annulus_rectangles(z: Point, m: f64, n: f64) -> [CrossingSpec; 4] {
    let (off, short) = (0.5 * (n + m), 0.5 * (n - m));
    let mk = |dx: f64, dy: f64, orientation| CrossingSpec {
        center: z.add(Point::new(dx, dy)),
        long_half: n,
        short_half: short,
        orientation,
    };
    [
        mk(0.0, -off, Orientation::East),
        mk(off, 0.0, Orientation::North),
        mk(0.0, off, Orientation::West),
        mk(-off, 0.0, Orientation::South),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusResult {
    pub inner: f64,
    pub outer: f64,
    pub rects: Vec<CrossingEstimate>,
}

fn combine(vs: impl Iterator<Item = Verdict>) -> Verdict {
    let vs: Vec<Verdict> = vs.collect();
    if let Some(v) = vs.iter().find(|v| matches!(v, Verdict::Vacuous(_))) {
        return *v;
    }
    if vs.contains(&Verdict::NotCrossable) {
        Verdict::NotCrossable
    } else if vs.contains(&Verdict::Uncertain) {
        Verdict::Uncertain
    } else {
        Verdict::Crossable
    }
}

impl AnnulusResult {
    pub fn all_vacuous(&self) -> bool {
        self.rects.iter().all(|r| r.vacuity.is_some())
    }

    /// Conjunction of the four point verdicts at rectangle threshold `c`.
    pub fn verdict(&self, c: f64) -> Verdict {
        combine(self.rects.iter().map(|r| r.verdict(c)))
    }

    pub fn interval_verdict(&self, c: f64, confidence: f64) -> Verdict {
        combine(self.rects.iter().map(|r| r.interval_verdict(c, confidence)))
    }
}

/// Estimates all four rectangles of the annulus `A(z, m, n)`.
pub fn annulus_crossable(
    g: &EmbeddedGraph,
    z: Point,
    m: f64,
    n: f64,
    estimator: Estimator,
) -> Result<AnnulusResult, WalkError> {
    if !(n > m && m >= 0.0) {
        return Err(WalkError::InvalidParams(format!("annulus needs n > m >= 0, got m = {m}, n = {n}")));
    }
    let rects = annulus_rectangles(z, m, n)
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let est = match estimator {
                Estimator::MonteCarlo { trials, seed } => {
                    Estimator::MonteCarlo { trials, seed: derive_seed(seed, k as u64) }
                }
                Estimator::Exact => Estimator::Exact,
            };
            evaluate_crossing(g, spec, est)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AnnulusResult { inner: m, outer: n, rects })
}

impl Verdict {
    pub fn vacuity(self) -> Option<Vacuity> {
        match self {
            Verdict::Vacuous(v) => Some(v),
            _ => None,
        }
    }
}
