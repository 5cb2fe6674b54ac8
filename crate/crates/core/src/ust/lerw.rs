use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geom::{Point, Rect};
use crate::graph::{EmbeddedGraph, VertexId};
use crate::rng::{rng_from_seed, SimRng};

use super::tree::NONE;
use super::wired::Network;
use super::UstError;

/// Position-in-path table for chronological loop erasure. All entries are
/// `NONE` between uses, so one table serves many walks.
#[derive(Debug)]
pub(crate) struct Eraser {
    idx: Vec<u32>,
}

impl Eraser {
    pub(crate) fn new(n: usize) -> Self {
        Eraser { idx: vec![NONE; n] }
    }
}

/// Bounding box of everything a walk visited.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Extent {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Extent {
    fn at(p: Point) -> Self {
        Extent { x0: p.x, x1: p.x, y0: p.y, y1: p.y }
    }

    #[inline]
    fn add(&mut self, p: Point) {
        self.x0 = self.x0.min(p.x);
        self.x1 = self.x1.max(p.x);
        self.y0 = self.y0.min(p.y);
        self.y1 = self.y1.max(p.y);
    }

    pub fn inside(&self, r: &Rect) -> bool {
        self.x0 >= r.x_min() && self.x1 <= r.x_max() && self.y0 >= r.y_min() && self.y1 <= r.y_max()
    }
}

/// A loop-erased path under construction.
struct Trail<'a> {
    path: Vec<VertexId>,
    er: &'a mut Eraser,
    done: bool,
}

impl<'a> Trail<'a> {
    fn start(v: VertexId, er: &'a mut Eraser, absorbed: bool) -> Self {
        if !absorbed {
            er.idx[v] = 0;
        }
        Trail { path: vec![v], er, done: absorbed }
    }

    #[inline]
    fn step(&mut self, v: VertexId, absorbed: bool) {
        if self.done {
            return;
        }
        if absorbed {
            self.path.push(v);
            self.finish();
        } else if self.er.idx[v] != NONE {
            let keep = self.er.idx[v] as usize + 1;
            for &u in &self.path[keep..] {
                self.er.idx[u] = NONE;
            }
            self.path.truncate(keep);
        } else {
            self.er.idx[v] = self.path.len() as u32;
            self.path.push(v);
        }
    }

    fn finish(&mut self) {
        for &u in &self.path {
            self.er.idx[u] = NONE;
        }
        self.done = true;
    }
}

#[inline]
fn step(net: &Network, v: VertexId, rng: &mut SimRng) -> VertexId {
    let nb = net.neighbors(v);
    nb[rng.random_range(0..nb.len())] as usize
}

pub(crate) struct Walked {
    pub path: Vec<VertexId>,
    pub steps: u64,
    pub extent: Extent,
}

/// Loop erasure of a simple random walk from `start` stopped on `absorbed`.
pub(crate) fn erased_walk(
    net: &Network,
    start: VertexId,
    absorbed: impl Fn(VertexId) -> bool,
    rng: &mut SimRng,
    cap: u64,
    er: &mut Eraser,
) -> Result<Walked, UstError> {
    let mut extent = Extent::at(net.pos(start));
    let mut trail = Trail::start(start, er, absorbed(start));
    let mut v = start;
    let mut steps = 0u64;
    while !trail.done {
        if steps == cap {
            trail.finish();
            return Err(UstError::CapExceeded { start, cap });
        }
        v = step(net, v, rng);
        steps += 1;
        extent.add(net.pos(v));
        let a = absorbed(v);
        trail.step(v, a);
    }
    Ok(Walked { path: trail.path, steps, extent })
}

/// Which absorbing set a joint walk met first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FirstHit {
    First,
    Second,
    Both,
}

pub(crate) struct JointWalked {
    pub first: Vec<VertexId>,
    pub second: Vec<VertexId>,
    pub first_hit: FirstHit,
    /// The continued walk met the already hit set again before the other one.
    pub rehit: bool,
    pub extent: Extent,
}

/// One walk serving two samplers: run until it meets either absorbing set,
/// then continue the same walk until it meets the other. Each sampler gets
/// the loop erasure of the walk up to its own hitting time.
#[allow(clippy::too_many_arguments)]
pub(crate) fn joint_walk(
    net: &Network,
    start: VertexId,
    abs1: impl Fn(VertexId) -> bool,
    abs2: impl Fn(VertexId) -> bool,
    rng: &mut SimRng,
    cap: u64,
    er1: &mut Eraser,
    er2: &mut Eraser,
) -> Result<JointWalked, UstError> {
    let mut extent = Extent::at(net.pos(start));
    let mut t1 = Trail::start(start, er1, abs1(start));
    let mut t2 = Trail::start(start, er2, abs2(start));
    let mut first_hit = match (t1.done, t2.done) {
        (true, true) => Some(FirstHit::Both),
        (true, false) => Some(FirstHit::First),
        (false, true) => Some(FirstHit::Second),
        _ => None,
    };
    let mut rehit = false;
    let mut v = start;
    let mut steps = 0u64;
    while !(t1.done && t2.done) {
        if steps == cap {
            t1.finish();
            t2.finish();
            return Err(UstError::CapExceeded { start, cap });
        }
        v = step(net, v, rng);
        steps += 1;
        extent.add(net.pos(v));
        let (a1, a2) = (abs1(v), abs2(v));
        if (t1.done && a1) || (t2.done && a2) {
            rehit = true;
        }
        t1.step(v, a1);
        t2.step(v, a2);
        if first_hit.is_none() {
            first_hit = match (t1.done, t2.done) {
                (true, true) => Some(FirstHit::Both),
                (true, false) => Some(FirstHit::First),
                (false, true) => Some(FirstHit::Second),
                _ => None,
            };
        }
    }
    Ok(JointWalked { first: t1.path, second: t2.path, first_hit: first_hit.unwrap_or(FirstHit::Both), rehit, extent })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lerw {
    pub path: Vec<VertexId>,
    pub steps: u64,
}

/// Chronological loop erasure of a simple random walk from `start` stopped
/// on the first visit to `absorbing`. Exceeding `cap` steps is an error.
pub fn lerw(g: &EmbeddedGraph, start: VertexId, absorbing: &[bool], seed: u64, cap: u64) -> Result<Lerw, UstError> {
    if start >= g.len() {
        return Err(UstError::VertexOutOfRange(start));
    }
    if absorbing.len() != g.len() {
        return Err(UstError::Domain("absorbing mask length differs from vertex count".into()));
    }
    // the absorbing set must be reachable
    let mut seen = vec![false; g.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut reachable = absorbing[start];
    while let Some(u) = queue.pop_front() {
        if reachable {
            break;
        }
        for &w in g.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                if absorbing[w] {
                    reachable = true;
                }
                queue.push_back(w);
            }
        }
    }
    if !reachable {
        return Err(UstError::Unreachable { vertex: start });
    }
    let net = Network::new(g);
    let mut er = Eraser::new(g.len());
    let mut rng = rng_from_seed(seed);
    let w = erased_walk(&net, start, |v| absorbing[v], &mut rng, cap, &mut er)?;
    Ok(Lerw { path: w.path, steps: w.steps })
}
