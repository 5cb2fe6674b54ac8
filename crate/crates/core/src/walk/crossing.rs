use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geom::{Point, Rect};
use crate::graph::{EmbeddedGraph, VertexId};
use crate::rng::{derive_seed, rng_from_seed};
use crate::stats::wilson_interval;

use super::walker::{WalkGraph, WalkOutcome, FREE, KILL, TARGET};
use super::{solve_hitting_exact, WalkError};

/// Direction of travel from the start square to the target square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    East,
    North,
    West,
    South,
}

impl Orientation {
    pub fn unit(self) -> Point {
        match self {
            Orientation::East => Point::new(1.0, 0.0),
            Orientation::North => Point::new(0.0, 1.0),
            Orientation::West => Point::new(-1.0, 0.0),
            Orientation::South => Point::new(0.0, -1.0),
        }
    }

    pub fn rot90(self) -> Self {
        match self {
            Orientation::East => Orientation::North,
            Orientation::North => Orientation::West,
            Orientation::West => Orientation::South,
            Orientation::South => Orientation::East,
        }
    }

    fn horizontal(self) -> bool {
        matches!(self, Orientation::East | Orientation::West)
    }
}

/// Rectangle with half-sides `long_half × short_half` along the orientation,
/// start square `B₁ = Λ_{b/2}(z − (a−b)e)` and target square `B₂ = Λ_{b/2}(z + (a−b)e)`.
/// The standard shape is `a = 3m, b = m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingSpec {
    pub center: Point,
    pub long_half: f64,
    pub short_half: f64,
    pub orientation: Orientation,
}

impl CrossingSpec {
    pub fn standard(center: Point, m: f64, orientation: Orientation) -> Self {
        CrossingSpec { center, long_half: 3.0 * m, short_half: m, orientation }
    }

    pub fn rect(&self) -> Rect {
        if self.orientation.horizontal() {
            Rect::new(self.center, self.long_half, self.short_half)
        } else {
            Rect::new(self.center, self.short_half, self.long_half)
        }
    }

    fn offset(&self) -> Point {
        self.orientation.unit().scale(self.long_half - self.short_half)
    }

    pub fn b1(&self) -> Rect {
        Rect::square(self.center.sub(self.offset()), 0.5 * self.short_half)
    }

    pub fn b2(&self) -> Rect {
        Rect::square(self.center.add(self.offset()), 0.5 * self.short_half)
    }

    pub fn translate(&self, by: Point) -> Self {
        CrossingSpec { center: self.center.add(by), ..*self }
    }

    /// Rotation by 90° about the origin.
    pub fn rot90(&self) -> Self {
        CrossingSpec { center: self.center.rot90(), orientation: self.orientation.rot90(), ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Estimator {
    MonteCarlo {
        trials: u64,
        seed: u64,
    },
    /// Exact hitting probabilities from the linear solve.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Vacuity {
    NoStart,
    NoTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Crossable,
    NotCrossable,
    /// A confidence interval straddles the threshold.
    Uncertain,
    Vacuous(Vacuity),
}

impl Verdict {
    /// Vacuous rectangles count as not crossable.
    pub fn is_crossable(self) -> bool {
        self == Verdict::Crossable
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StartRow {
    pub vertex: VertexId,
    pub successes: u64,
    pub trials: u64,
    /// Walks stopped by the step cap (counted as failures).
    pub capped: u64,
    pub exact: Option<f64>,
}

impl StartRow {
    pub fn p_hat(&self) -> f64 {
        self.exact.unwrap_or(self.successes as f64 / self.trials as f64)
    }

    pub fn ci(&self, confidence: f64) -> (f64, f64) {
        match self.exact {
            Some(h) => (h, h),
            None => wilson_interval(self.successes, self.trials, confidence),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingEstimate {
    pub spec: CrossingSpec,
    pub rows: Vec<StartRow>,
    pub target_count: usize,
    pub vacuity: Option<Vacuity>,
}

impl CrossingEstimate {
    fn vacuous(spec: CrossingSpec, starts: usize, targets: usize) -> Option<Self> {
        let vacuity = if starts == 0 {
            Vacuity::NoStart
        } else if targets == 0 {
            Vacuity::NoTarget
        } else {
            return None;
        };
        Some(CrossingEstimate { spec, rows: Vec::new(), target_count: targets, vacuity: Some(vacuity) })
    }

    /// Minimum over starts of the estimate, with the minimizing row.
    pub fn min(&self) -> Option<(f64, &StartRow)> {
        self.rows.iter().map(|r| (r.p_hat(), r)).min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.vertex.cmp(&b.1.vertex)))
    }

    /// Point verdict: crossable iff the minimum estimate is at least `c`.
    pub fn verdict(&self, c: f64) -> Verdict {
        if let Some(v) = self.vacuity {
            return Verdict::Vacuous(v);
        }
        match self.min() {
            Some((p, _)) if p >= c => Verdict::Crossable,
            _ => Verdict::NotCrossable,
        }
    }

    /// Interval verdict from per-start confidence intervals.
    pub fn interval_verdict(&self, c: f64, confidence: f64) -> Verdict {
        if let Some(v) = self.vacuity {
            return Verdict::Vacuous(v);
        }
        let cis: Vec<(f64, f64)> = self.rows.iter().map(|r| r.ci(confidence)).collect();
        if cis.iter().any(|&(_, hi)| hi < c) {
            Verdict::NotCrossable
        } else if cis.iter().all(|&(lo, _)| lo >= c) {
            Verdict::Crossable
        } else {
            Verdict::Uncertain
        }
    }

    pub fn csv_header() -> &'static str {
        "env,seed,z_x,z_y,m,start_id,trials,successes,p_hat,ci_low,ci_high"
    }

    pub fn csv_rows(&self, env: &str, seed: u64, confidence: f64) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                let (lo, hi) = r.ci(confidence);
                format!(
                    "{env},{seed},{},{},{},{},{},{},{},{},{}",
                    self.spec.center.x,
                    self.spec.center.y,
                    self.spec.short_half,
                    r.vertex,
                    r.trials,
                    r.successes,
                    r.p_hat(),
                    lo,
                    hi
                )
            })
            .collect()
    }
}

struct Layout {
    starts: Vec<VertexId>,
    status: Vec<u8>,
    targets: usize,
}

fn layout(g: &EmbeddedGraph, spec: &CrossingSpec) -> Layout {
    let (rect, b1, b2) = (spec.rect(), spec.b1(), spec.b2());
    let mut starts = Vec::new();
    let mut targets = 0;
    let status = g
        .positions()
        .iter()
        .enumerate()
        .map(|(v, &p)| {
            if !rect.contains(p) {
                KILL
            } else if b2.contains(p) {
                targets += 1;
                TARGET
            } else {
                if b1.contains(p) {
                    starts.push(v);
                }
                FREE
            }
        })
        .collect();
    Layout { starts, status, targets }
}

const STEP_CAP: u64 = 1 << 34;

/// Monte Carlo crossing estimate: per start vertex in `B₁`, the fraction of
/// walks entering `B₂` before landing outside the rectangle.
pub fn estimate_crossing(g: &EmbeddedGraph, spec: &CrossingSpec, trials: u64, seed: u64) -> CrossingEstimate {
    let lay = layout(g, spec);
    if let Some(v) = CrossingEstimate::vacuous(*spec, lay.starts.len(), lay.targets) {
        return v;
    }
    let wg = WalkGraph::new(g, lay.status);
    let rows = lay
        .starts
        .par_iter()
        .map(|&x| {
            let (reach_target, _) = wg.reach(x);
            let mut row = StartRow { vertex: x, successes: 0, trials, capped: 0, exact: None };
            if !reach_target {
                return row;
            }
            let mut rng = rng_from_seed(derive_seed(seed, x as u64));
            for _ in 0..trials {
                match wg.run(x, &mut rng, STEP_CAP) {
                    WalkOutcome::Target => row.successes += 1,
                    WalkOutcome::Killed => {}
                    WalkOutcome::Cap => row.capped += 1,
                }
            }
            row
        })
        .collect();
    CrossingEstimate { spec: *spec, rows, target_count: lay.targets, vacuity: None }
}

/// Exact crossing probabilities from every start vertex.
pub fn exact_crossing(g: &EmbeddedGraph, spec: &CrossingSpec) -> Result<CrossingEstimate, WalkError> {
    let lay = layout(g, spec);
    if let Some(v) = CrossingEstimate::vacuous(*spec, lay.starts.len(), lay.targets) {
        return Ok(v);
    }
    let wg = WalkGraph::new(g, lay.status.clone());
    let target: Vec<bool> = lay.status.iter().map(|&s| s == TARGET).collect();
    let mut kill: Vec<bool> = lay.status.iter().map(|&s| s == KILL).collect();
    isolate_trapped(g, &mut kill, &target);
    let sol = solve_hitting_exact(g, &target, &kill)?;
    let rows = lay
        .starts
        .iter()
        .map(|&x| {
            let h = if wg.reach(x).0 { sol.h[x] } else { 0.0 };
            StartRow { vertex: x, successes: 0, trials: 0, capped: 0, exact: Some(h) }
        })
        .collect();
    Ok(CrossingEstimate { spec: *spec, rows, target_count: lay.targets, vacuity: None })
}

/// Marks free components touching neither set as killed so the solve is regular.
fn isolate_trapped(g: &EmbeddedGraph, kill: &mut [bool], target: &[bool]) {
    let n = g.len();
    let mut seen: Vec<bool> = (0..n).map(|v| kill[v] || target[v]).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&v| seen[v]).collect();
    while let Some(v) = stack.pop() {
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    for v in 0..n {
        if !seen[v] {
            kill[v] = true;
        }
    }
}

pub fn evaluate_crossing(
    g: &EmbeddedGraph,
    spec: &CrossingSpec,
    estimator: Estimator,
) -> Result<CrossingEstimate, WalkError> {
    match estimator {
        Estimator::MonteCarlo { trials, seed } => Ok(estimate_crossing(g, spec, trials, seed)),
        Estimator::Exact => exact_crossing(g, spec),
    }
}
