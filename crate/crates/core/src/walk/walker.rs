use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{EmbeddedGraph, VertexId};
use crate::rng::{rng_from_seed, SimRng};

use super::WalkError;

/// Stop when landing in `target`, or when landing outside `region`.
#[derive(Debug, Clone, Copy, Default)]
pub struct StopRule<'a> {
    pub target: Option<&'a [bool]>,
    pub region: Option<&'a [bool]>,
}

impl StopRule<'_> {
    fn status(&self, v: VertexId) -> Option<StopReason> {
        if self.region.is_some_and(|r| !r[v]) {
            Some(StopReason::ExitedRegion)
        } else if self.target.is_some_and(|t| t[v]) {
            Some(StopReason::HitTarget)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    HitTarget,
    ExitedRegion,
    Cap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkTrace {
    pub start: VertexId,
    pub vertices: Vec<VertexId>,
    pub stop: StopReason,
    pub steps: usize,
    /// Index into `vertices` of the first vertex outside the region.
    pub exit_index: Option<usize>,
}

/// Discrete-time simple random walk from `start` until the stop rule fires
/// or `step_cap` steps have been taken.
pub fn run_walk(
    g: &EmbeddedGraph,
    start: VertexId,
    stop: StopRule,
    seed: u64,
    step_cap: usize,
) -> Result<WalkTrace, WalkError> {
    if start >= g.len() {
        return Err(WalkError::VertexOutOfRange(start));
    }
    if step_cap == 0 {
        return Err(WalkError::InvalidParams("step cap must be positive".into()));
    }
    for m in [stop.target, stop.region].into_iter().flatten() {
        if m.len() != g.len() {
            return Err(WalkError::InvalidParams("mask length differs from vertex count".into()));
        }
    }
    let mut rng = rng_from_seed(seed);
    let mut vertices = vec![start];
    let mut v = start;
    let mut reason = stop.status(v);
    while reason.is_none() && vertices.len() <= step_cap {
        let nb = g.neighbors(v);
        if nb.is_empty() {
            break;
        }
        v = nb[rng.random_range(0..nb.len())];
        vertices.push(v);
        reason = stop.status(v);
    }
    let stop = reason.unwrap_or(StopReason::Cap);
    let exit_index = (stop == StopReason::ExitedRegion).then(|| vertices.len() - 1);
    Ok(WalkTrace { start, steps: vertices.len() - 1, vertices, stop, exit_index })
}

/// Compressed adjacency with a per-vertex status byte, for tight walk loops.
#[derive(Debug, Clone)]
pub struct WalkGraph {
    offsets: Vec<u32>,
    nbrs: Vec<u32>,
    status: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkOutcome {
    Target,
    Killed,
    Cap,
}

pub(crate) const FREE: u8 = 0;
pub(crate) const TARGET: u8 = 1;
pub(crate) const KILL: u8 = 2;

impl WalkGraph {
    /// `status[v]` is 0 (free), 1 (target) or 2 (kill).
    pub fn new(g: &EmbeddedGraph, status: Vec<u8>) -> Self {
        assert_eq!(status.len(), g.len());
        let mut offsets = Vec::with_capacity(g.len() + 1);
        let mut nbrs = Vec::with_capacity(2 * g.edge_count());
        offsets.push(0);
        for v in 0..g.len() {
            nbrs.extend(g.neighbors(v).iter().map(|&w| w as u32));
            offsets.push(nbrs.len() as u32);
        }
        WalkGraph { offsets, nbrs, status }
    }

    pub fn from_masks(g: &EmbeddedGraph, target: &[bool], kill: &[bool]) -> Self {
        let status = (0..g.len())
            .map(|v| {
                if kill[v] {
                    KILL
                } else if target[v] {
                    TARGET
                } else {
                    FREE
                }
            })
            .collect();
        Self::new(g, status)
    }

    pub fn status(&self, v: VertexId) -> u8 {
        self.status[v]
    }

    /// Walk until a target or kill vertex is hit.
    #[inline]
    pub fn run(&self, start: VertexId, rng: &mut SimRng, cap: u64) -> WalkOutcome {
        let mut v = start as u32;
        let mut steps = 0u64;
        loop {
            match self.status[v as usize] {
                TARGET => return WalkOutcome::Target,
                KILL => return WalkOutcome::Killed,
                _ => {}
            }
            if steps >= cap {
                return WalkOutcome::Cap;
            }
            let (a, b) = (self.offsets[v as usize], self.offsets[v as usize + 1]);
            let d = b - a;
            if d == 0 {
                return WalkOutcome::Cap;
            }
            v = self.nbrs[(a + rng.random_range(0..d)) as usize];
            steps += 1;
        }
    }

    /// Vertices reachable from `start` through free vertices, and whether a
    /// target / kill vertex is reachable.
    pub fn reach(&self, start: VertexId) -> (bool, bool) {
        let n = self.status.len();
        let mut seen = vec![false; n];
        let mut stack = vec![start];
        seen[start] = true;
        let (mut t, mut k) = (false, false);
        while let Some(v) = stack.pop() {
            match self.status[v] {
                TARGET => {
                    t = true;
                    continue;
                }
                KILL => {
                    k = true;
                    continue;
                }
                _ => {}
            }
            for &w in &self.nbrs[self.offsets[v] as usize..self.offsets[v + 1] as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w as usize);
                }
            }
        }
        (t, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::generate_square_lattice;
    use crate::geom::{Point, Rect};

    #[test]
    fn start_in_target_is_length_one() {
        let g = generate_square_lattice(Rect::square(Point::ORIGIN, 2.0), 1.0).unwrap();
        let mut t = vec![false; g.len()];
        t[3] = true;
        let tr = run_walk(&g, 3, StopRule { target: Some(&t), region: None }, 1, 10).unwrap();
        assert_eq!(tr.vertices, vec![3]);
        assert_eq!(tr.stop, StopReason::HitTarget);
    }

    #[test]
    fn two_vertex_path() {
        let g = EmbeddedGraph::from_edges(vec![Point::new(0., 0.), Point::new(1., 0.)], &[(0, 1)]).unwrap();
        let t = [false, true];
        let tr = run_walk(&g, 0, StopRule { target: Some(&t), region: None }, 5, 10).unwrap();
        assert_eq!(tr.vertices, vec![0, 1]);
    }

    #[test]
    fn cap_is_reported() {
        let g = generate_square_lattice(Rect::square(Point::ORIGIN, 2.0), 1.0).unwrap();
        let tr = run_walk(&g, 12, StopRule::default(), 5, 7).unwrap();
        assert_eq!(tr.stop, StopReason::Cap);
        assert_eq!(tr.steps, 7);
        assert!(tr.vertices.windows(2).all(|w| g.has_edge(w[0], w[1])));
    }

    #[test]
    fn replay_is_identical() {
        let g = generate_square_lattice(Rect::square(Point::ORIGIN, 2.0), 1.0).unwrap();
        let a = run_walk(&g, 12, StopRule::default(), 99, 200).unwrap();
        let b = run_walk(&g, 12, StopRule::default(), 99, 200).unwrap();
        assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
    }

    #[test]
    fn exit_index_points_outside() {
        let g = generate_square_lattice(Rect::square(Point::ORIGIN, 3.0), 1.0).unwrap();
        let region: Vec<bool> = g.positions().iter().map(|p| p.x.abs() <= 1.0 && p.y.abs() <= 1.0).collect();
        let o = g.closest_vertex(Point::ORIGIN).unwrap();
        let tr = run_walk(&g, o, StopRule { target: None, region: Some(&region) }, 4, 10_000).unwrap();
        assert_eq!(tr.stop, StopReason::ExitedRegion);
        assert!(!region[tr.vertices[tr.exit_index.unwrap()]]);
    }
}
