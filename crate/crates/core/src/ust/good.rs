use serde::{Deserialize, Serialize};

use crate::geom::{Point, Rect};
use crate::graph::VertexId;
use crate::rng::{rng_from_seed, SimRng};

use super::lerw::{Eraser, Extent};
use super::tree::SpanningTree;
use super::wilson::{grow, DEFAULT_STEP_CAP};
use super::wired::{Network, WiredGraph};
use super::UstError;

/// Deepest level before the schedule gives up.
const MAX_LEVEL: u32 = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub j: u32,
    pub pitch: f64,
    pub cells: usize,
    /// Representatives queued at the start of the level.
    pub queued: usize,
    /// Representatives that still needed a branch when their turn came.
    pub sampled: usize,
    pub max_branch_diameter: f64,
    /// Every walk of the level stayed in `Λ_{2r}(z)`.
    pub walks_inside: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodAlgorithmState {
    pub z: Point,
    pub r: f64,
    pub j0: u32,
    pub levels: Vec<LevelRecord>,
    /// Walks from levels `j ≥ j0` stayed in `Λ_{2r}(z)`.
    pub walks_contained: bool,
    /// Largest branch diameter over levels `j > j0`, divided by `r`.
    pub late_diameter_ratio: f64,
}

impl GoodAlgorithmState {
    /// Whether late branches have diameter at most `eps · r`.
    pub fn small_late_branches(&self, eps: f64) -> bool {
        self.late_diameter_ratio <= eps
    }
}

/// Number of grid cells of pitch `r 6^{-j}`, anchored at `z`, meeting
/// `Λ_{(1+2^{-j}) r}(z)`.
pub fn cells_at_level(j: u32) -> usize {
    let per_half = ((1.0 + 0.5f64.powi(j as i32)) * 6f64.powi(j as i32) - 1e-9).ceil() as usize;
    (2 * per_half).pow(2)
}

/// Level-`j` queue: in every cell of `z + r 6^{-j} ℤ²` meeting
/// `Λ_{(1+2^{-j}) r}(z)`, the vertex furthest from `z` among those not yet
/// done (ties by id). Cells in row-major order from the bottom left.
pub fn level_queue(net: &Network, z: Point, r: f64, j: u32, done: impl Fn(VertexId) -> bool) -> Vec<VertexId> {
    let h = r * 6f64.powi(-(j as i32));
    let reach = (1.0 + 0.5f64.powi(j as i32)) * r;
    let mut best: std::collections::BTreeMap<(i64, i64), VertexId> = std::collections::BTreeMap::new();
    for v in net.vertices_in(&Rect::square(z, reach)) {
        if done(v) {
            continue;
        }
        let p = net.pos(v);
        let key = (((p.y - z.y) / h).floor() as i64, ((p.x - z.x) / h).floor() as i64);
        let d = p.dist(z);
        best.entry(key)
            .and_modify(|b| {
                let db = net.pos(*b).dist(z);
                if d > db || (d == db && v < *b) {
                    *b = v;
                }
            })
            .or_insert(v);
    }
    best.into_values().collect()
}

/// Hull-based Euclidean diameter of a vertex set.
pub(crate) fn diameter(net: &Network, vs: &[VertexId]) -> f64 {
    let mut pts: Vec<Point> = vs.iter().map(|&v| net.pos(v)).collect();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return if pts.len() == 2 { pts[0].dist(pts[1]) } else { 0.0 };
    }
    let mut hull: Vec<Point> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let it: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in it {
            while hull.len() >= start + 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                if b.sub(a).cross(p.sub(a)) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    let mut d: f64 = 0.0;
    for i in 0..hull.len() {
        for j in i + 1..hull.len() {
            d = d.max(hull[i].dist(hull[j]));
        }
    }
    d
}

/// What the schedule needs from a sampler: whether a vertex still needs a
/// branch, and how to sample one.
pub(crate) trait Sampler {
    fn done(&self, v: VertexId) -> bool;
    /// Sample the branch(es) from `v`; returns the vertices of the new
    /// branches and the extent of the walk.
    fn sample(&mut self, v: VertexId) -> Result<Option<(Vec<VertexId>, Extent)>, UstError>;
}

/// Run levels `from..` (at most up to `to`) of the schedule around `z` at
/// radius `r`, stopping once every vertex of `Λ_r(z)` is done.
pub(crate) fn run_levels<S: Sampler>(
    net: &Network,
    s: &mut S,
    z: Point,
    r: f64,
    from: u32,
    to: Option<u32>,
    records: &mut Vec<LevelRecord>,
) -> Result<bool, UstError> {
    let core = net.vertices_in(&Rect::square(z, r));
    let outer = Rect::square(z, 2.0 * r);
    let mut j = from;
    loop {
        if core.iter().all(|&v| s.done(v)) {
            return Ok(true);
        }
        if to.is_some_and(|t| j > t) {
            return Ok(false);
        }
        if j > MAX_LEVEL {
            return Err(UstError::Domain(format!("schedule around {z:?} did not finish by level {MAX_LEVEL}")));
        }
        let queue = level_queue(net, z, r, j, |v| s.done(v));
        let mut rec = LevelRecord {
            j,
            pitch: r * 6f64.powi(-(j as i32)),
            cells: cells_at_level(j),
            queued: queue.len(),
            sampled: 0,
            max_branch_diameter: 0.0,
            walks_inside: true,
        };
        for v in queue {
            if let Some((verts, ext)) = s.sample(v)? {
                rec.sampled += 1;
                rec.max_branch_diameter = rec.max_branch_diameter.max(diameter(net, &verts));
                rec.walks_inside &= ext.inside(&outer);
            }
        }
        records.push(rec);
        j += 1;
    }
}

struct Single<'a> {
    wg: &'a WiredGraph,
    tree: &'a mut SpanningTree,
    rng: &'a mut SimRng,
    er: Eraser,
}

impl Sampler for Single<'_> {
    fn done(&self, v: VertexId) -> bool {
        !self.wg.is_interior(v) || self.tree.contains(v)
    }

    fn sample(&mut self, v: VertexId) -> Result<Option<(Vec<VertexId>, Extent)>, UstError> {
        Ok(grow(self.wg, self.tree, v, self.rng, DEFAULT_STEP_CAP, &mut self.er)?.map(|w| (w.path, w.extent)))
    }
}

/// The good algorithm on a fresh tree.
pub fn good_algorithm(
    wg: &WiredGraph,
    z: Point,
    r: f64,
    j0: u32,
    seed: u64,
) -> Result<(GoodAlgorithmState, SpanningTree), UstError> {
    let mut tree = SpanningTree::empty(wg.len());
    let mut rng = rng_from_seed(seed);
    let st = good_algorithm_on(wg, &mut tree, z, r, j0, &mut rng)?;
    Ok((st, tree))
}

/// The good algorithm continuing an existing partial tree. Requires every
/// vertex of `Λ_{2r}(z)` to be interior.
pub fn good_algorithm_on(
    wg: &WiredGraph,
    tree: &mut SpanningTree,
    z: Point,
    r: f64,
    j0: u32,
    rng: &mut SimRng,
) -> Result<GoodAlgorithmState, UstError> {
    if !(r > 0.0) {
        return Err(UstError::Domain(format!("radius {r} must be positive")));
    }
    let net = wg.network().clone();
    if let Some(v) = net.vertices_in(&Rect::square(z, 2.0 * r)).into_iter().find(|&v| !wg.is_interior(v)) {
        return Err(UstError::Domain(format!("boundary vertex {v} inside the doubled box around {z:?}")));
    }
    let mut levels = Vec::new();
    let mut s = Single { wg, tree, rng, er: Eraser::new(wg.len()) };
    run_levels(&net, &mut s, z, r, 0, None, &mut levels)?;
    let walks_contained = levels.iter().filter(|l| l.j >= j0).all(|l| l.walks_inside);
    let late = levels.iter().filter(|l| l.j > j0).map(|l| l.max_branch_diameter).fold(0.0, f64::max);
    Ok(GoodAlgorithmState { z, r, j0, levels, walks_contained, late_diameter_ratio: late / r })
}
