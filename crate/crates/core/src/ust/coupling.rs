use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geom::{Point, Rect};
use crate::graph::{EmbeddedGraph, VertexId};
use crate::planar::faces_with_outer;
use crate::rng::{rng_from_seed, SimRng};

use super::good::{run_levels, LevelRecord, Sampler};
use super::lerw::{joint_walk, Eraser, Extent, FirstHit};
use super::tree::{verify_agreement, SpanningTree};
use super::wilson::{complete_tree, grow, DEFAULT_STEP_CAP};
use super::wired::{Network, WiredGraph};
use super::UstError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    /// Abort constant: stop once the isolated scale drops below `c0 · r0`.
    pub c0: f64,
    /// Cutoff scale below which crossing estimates are not trusted.
    pub r0: f64,
    /// Last level of the schedule counted in the third event.
    pub j0: u32,
    pub step_cap: u64,
    /// Finish every tree with Wilson's algorithm after the coupling.
    pub complete_trees: bool,
    /// Drive the two first branches by one shared walk instead of two
    /// independent ones (with equal domains the samplers then coincide).
    pub joint_first_branch: bool,
}

impl Default for CouplingParams {
    fn default() -> Self {
        CouplingParams {
            c0: 4.0,
            r0: 0.0,
            j0: 1,
            step_cap: DEFAULT_STEP_CAP,
            complete_trees: false,
            joint_first_branch: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Event {
    /// Both first branches avoid `Λ_{0.7s}`.
    E1,
    /// The spliced second branches agree in `Λ_{0.6s}`.
    E2,
    /// Early schedule levels agree in `Λ_{0.5s}`.
    E3,
    /// Late schedule levels agree in `Λ_{0.1s}`.
    E4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    E1,
    E2,
    E3,
    E4,
    Iterating,
    Aborted,
    Success,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttemptOutcome {
    Success,
    Failed(Event),
    /// An annulus of the attempt held no vertex; nothing was sampled.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub scale: f64,
    pub outcome: AttemptOutcome,
    pub w1: Option<VertexId>,
    pub w2: Option<VertexId>,
    /// Which domain the second branch reached first.
    pub first_hit: Option<FirstHit>,
    /// Joint walks that met their first set again before the second.
    pub rehits: usize,
    pub levels: Vec<LevelRecord>,
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptLine {
    pub point: usize,
    pub attempt: usize,
    pub stage: String,
    pub event: String,
    pub scale: f64,
    pub radius: Option<f64>,
}

/// Result of a base or iterated coupling around one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingState {
    pub z: Point,
    pub r: f64,
    pub c0: f64,
    pub r0: f64,
    pub stage: Stage,
    /// First failed event of the last attempt.
    pub failed: Option<Event>,
    pub attempts: Vec<AttemptRecord>,
    /// Isolation increments `I_1, I_2, ...` after each failure.
    pub increments: Vec<u32>,
    pub n: usize,
    pub i_z: u32,
    pub j_z: u32,
    /// Half-side of the box where the trees agree (0 unless successful).
    pub agreement_radius: f64,
    pub tree: SpanningTree,
    pub other: SpanningTree,
    pub transcript: Vec<TranscriptLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub z: Point,
    pub j_z: u32,
    pub i_z: u32,
    pub n: usize,
    pub increments: Vec<u32>,
    pub success: bool,
    pub attempts: Vec<AttemptRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullCoupling {
    pub tree: SpanningTree,
    pub coupled: Vec<SpanningTree>,
    pub r: f64,
    /// `0.05 · 6^{-I} r` when every point succeeded, else 0.
    pub radius: f64,
    pub points: Vec<PointRecord>,
    /// Exact agreement on `Λ_R(z_i)` for each point (all false when `R = 0`).
    pub agreement: Vec<bool>,
    pub transcript: Vec<TranscriptLine>,
}

impl FullCoupling {
    pub fn success(&self) -> bool {
        self.radius > 0.0
    }

    /// `I = max_i (J_i + I_i)`.
    pub fn i_max(&self) -> u32 {
        self.points.iter().map(|p| p.j_z + p.i_z).max().unwrap_or(0)
    }
}

fn cheb(p: Point, z: Point) -> f64 {
    p.dist_inf(z)
}

/// Smallest `k ≥ 0` with no tree vertex in `Λ_{6^{-k} r}(z)`; `None` if a
/// tree vertex sits at `z` itself.
fn isolation(net: &Network, trees: &[&SpanningTree], z: Point, r: f64) -> Option<u32> {
    let d = net
        .vertices_in(&Rect::square(z, r))
        .into_iter()
        .filter(|&v| trees.iter().any(|t| t.contains(v)))
        .map(|v| cheb(net.pos(v), z))
        .fold(f64::INFINITY, f64::min);
    let mut k = 0u32;
    while 6f64.powi(-(k as i32)) * r >= d {
        k += 1;
        if k > 64 {
            return None;
        }
    }
    Some(k)
}

/// Vertex of the annulus `inner < |p - z|_∞ ≤ outer` nearest to the point of
/// its midline at angle 0; ties by id.
fn annulus_pick(net: &Network, z: Point, inner: f64, outer: f64) -> Option<VertexId> {
    let target = Point::new(z.x + 0.5 * (inner + outer), z.y);
    net.vertices_in(&Rect::square(z, outer))
        .into_iter()
        .filter(|&v| cheb(net.pos(v), z) > inner)
        .min_by(|&a, &b| net.pos(a).dist(target).total_cmp(&net.pos(b).dist(target)).then(a.cmp(&b)))
}

/// Vertices of a closed walk inside `A(z, inner, outer)` that winds around
/// `z`: the outer face boundary of the largest-area component of the annulus
/// subgraph whose boundary encloses `z`.
fn circuit(net: &Network, z: Point, inner: f64, outer: f64) -> Option<Vec<VertexId>> {
    let ids: Vec<VertexId> =
        net.vertices_in(&Rect::square(z, outer)).into_iter().filter(|&v| cheb(net.pos(v), z) >= inner).collect();
    let mut local = std::collections::HashMap::new();
    for (i, &v) in ids.iter().enumerate() {
        local.insert(v, i);
    }
    let adj: Vec<Vec<usize>> = ids
        .iter()
        .map(|&v| net.neighbors(v).iter().filter_map(|&w| local.get(&(w as usize)).copied()).collect())
        .collect();
    let h = EmbeddedGraph::from_adjacency(ids.iter().map(|&v| net.pos(v)).collect(), adj).ok()?;
    let label = h.components();
    let k = label.iter().copied().max().map_or(0, |m| m + 1);
    let mut best: Option<(f64, Vec<VertexId>)> = None;
    for c in 0..k {
        let keep: Vec<bool> = label.iter().map(|&l| l == c).collect();
        let (hc, old) = h.induced(&keep);
        if hc.edge_count() < 3 {
            continue;
        }
        let Some((_, outer_face)) = faces_with_outer(&hc) else {
            continue;
        };
        let pts: Vec<Point> = outer_face.walk.iter().map(|&v| hc.pos(v)).collect();
        if winding_number(&pts, z) == 0 {
            continue;
        }
        let area = outer_face.signed_area.abs();
        if best.as_ref().is_none_or(|b| area > b.0) {
            let mut vs: Vec<VertexId> = outer_face.walk.iter().map(|&v| ids[old[v]]).collect();
            vs.sort_unstable();
            vs.dedup();
            best = Some((area, vs));
        }
    }
    best.map(|b| b.1)
}

/// Winding number of the closed polygon `pts` around `z`.
fn winding_number(pts: &[Point], z: Point) -> i64 {
    let mut total = 0.0;
    for i in 0..pts.len() {
        let (a, b) = (pts[i].sub(z), pts[(i + 1) % pts.len()].sub(z));
        total += a.cross(b).atan2(a.dot(b));
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

fn interior_box(d: &WiredGraph, bx: &Rect) -> bool {
    d.network().vertices_in(bx).into_iter().all(|v| d.is_interior(v))
}

struct Joint<'a> {
    net: &'a Network,
    d1: &'a WiredGraph,
    d2: &'a WiredGraph,
    t1: &'a mut SpanningTree,
    t2: &'a mut SpanningTree,
    rng: &'a mut SimRng,
    er1: &'a mut Eraser,
    er2: &'a mut Eraser,
    cap: u64,
    rehits: usize,
    last_first: Option<FirstHit>,
}

impl Joint<'_> {
    fn abs1(&self, v: VertexId) -> bool {
        !self.d1.is_interior(v) || self.t1.contains(v)
    }
    fn abs2(&self, v: VertexId) -> bool {
        !self.d2.is_interior(v) || self.t2.contains(v)
    }
}

impl Sampler for Joint<'_> {
    fn done(&self, v: VertexId) -> bool {
        self.abs1(v) && self.abs2(v)
    }

    fn sample(&mut self, v: VertexId) -> Result<Option<(Vec<VertexId>, Extent)>, UstError> {
        if self.done(v) {
            return Ok(None);
        }
        let w = {
            let (d1, d2, t1, t2) = (self.d1, self.d2, &*self.t1, &*self.t2);
            joint_walk(
                self.net,
                v,
                |u| !d1.is_interior(u) || t1.contains(u),
                |u| !d2.is_interior(u) || t2.contains(u),
                self.rng,
                self.cap,
                self.er1,
                self.er2,
            )?
        };
        self.rehits += usize::from(w.rehit);
        self.last_first = Some(w.first_hit);
        let mut verts = w.first.clone();
        verts.extend_from_slice(&w.second);
        self.t1.graft(w.first);
        self.t2.graft(w.second);
        Ok(Some((verts, w.extent)))
    }
}

struct Ctx<'a> {
    d1: &'a WiredGraph,
    d2: &'a WiredGraph,
    net: Arc<Network>,
    p: CouplingParams,
    rng: SimRng,
    er1: Eraser,
    er2: Eraser,
    log: Vec<TranscriptLine>,
    point: usize,
    attempt: usize,
}

struct Iterated {
    success: bool,
    aborted: bool,
    failed: Option<Event>,
    attempts: Vec<AttemptRecord>,
    increments: Vec<u32>,
    k: u32,
    agreement_radius: f64,
}

impl<'a> Ctx<'a> {
    fn new(d1: &'a WiredGraph, d2: &'a WiredGraph, p: CouplingParams, seed: u64) -> Result<Self, UstError> {
        if !d1.same_network(d2) {
            return Err(UstError::Domain("the two domains must share one ambient graph".into()));
        }
        if !(p.c0 > 0.0) || p.r0 < 0.0 {
            return Err(UstError::Domain(format!("bad abort constants c0={} r0={}", p.c0, p.r0)));
        }
        let n = d1.len();
        Ok(Ctx {
            d1,
            d2,
            net: d1.network().clone(),
            p,
            rng: rng_from_seed(seed),
            er1: Eraser::new(n),
            er2: Eraser::new(n),
            log: Vec::new(),
            point: 0,
            attempt: 0,
        })
    }

    fn joint<'b>(&'b mut self, net: &'b Network, t1: &'b mut SpanningTree, t2: &'b mut SpanningTree) -> Joint<'b> {
        Joint {
            net,
            d1: self.d1,
            d2: self.d2,
            t1,
            t2,
            rng: &mut self.rng,
            er1: &mut self.er1,
            er2: &mut self.er2,
            cap: self.p.step_cap,
            rehits: 0,
            last_first: None,
        }
    }

    fn note(&mut self, stage: &str, event: &str, scale: f64, radius: Option<f64>) {
        self.log.push(TranscriptLine {
            point: self.point,
            attempt: self.attempt,
            stage: stage.into(),
            event: event.into(),
            scale,
            radius,
        });
    }

    /// One base coupling at scale `s` around `z`, continuing both trees.
    fn attempt(
        &mut self,
        t1: &mut SpanningTree,
        t2: &mut SpanningTree,
        z: Point,
        s: f64,
    ) -> Result<AttemptRecord, UstError> {
        let net = self.net.clone();
        let mut rec = AttemptRecord {
            scale: s,
            outcome: AttemptOutcome::Vacuous,
            w1: annulus_pick(&net, z, 0.8 * s, 0.9 * s),
            w2: annulus_pick(&net, z, 0.3 * s, 0.4 * s),
            first_hit: None,
            rehits: 0,
            levels: Vec::new(),
        };
        let (Some(w1), Some(w2)) = (rec.w1, rec.w2) else {
            let which = if rec.w1.is_none() { "E1" } else { "E2" };
            self.note(which, "vacuous", s, None);
            return Ok(rec);
        };

        let (d1, d2, cap) = (self.d1, self.d2, self.p.step_cap);
        let inner = Rect::square(z, 0.7 * s);
        let clear = |path: &[VertexId]| path.iter().all(|&v| !inner.contains(net.pos(v)));

        // E1: first branches from w1, independent unless asked otherwise
        let e1 = if self.p.joint_first_branch {
            let mut joint = self.joint(&net, t1, t2);
            match joint.sample(w1)? {
                Some((verts, _)) => clear(&verts),
                None => true,
            }
        } else {
            let b1 = grow(d1, t1, w1, &mut self.rng, cap, &mut self.er1)?;
            let b2 = grow(d2, t2, w1, &mut self.rng, cap, &mut self.er2)?;
            b1.as_ref().is_none_or(|w| clear(&w.path)) && b2.as_ref().is_none_or(|w| clear(&w.path))
        };
        self.note("E1", if e1 { "hold" } else { "fail" }, s, Some(0.7 * s));
        if !e1 {
            rec.outcome = AttemptOutcome::Failed(Event::E1);
            return Ok(rec);
        }

        let j0 = self.p.j0;
        let mut joint = self.joint(&net, t1, t2);

        // E2: one walk from w2 spliced between the two targets
        joint.sample(w2)?;
        rec.first_hit = joint.last_first;
        let rehit_e2 = joint.rehits > 0;
        let e2 = verify_agreement(&net, joint.t1, joint.t2, &Rect::square(z, 0.6 * s));

        // E3 / E4: schedule at radius 0.1 s
        let rho = 0.1 * s;
        let mut e3 = false;
        let mut e4 = false;
        if e2 {
            run_levels(&net, &mut joint, z, rho, 0, Some(j0), &mut rec.levels)?;
            e3 = verify_agreement(&net, joint.t1, joint.t2, &Rect::square(z, 0.5 * s));
            if e3 {
                run_levels(&net, &mut joint, z, rho, j0 + 1, None, &mut rec.levels)?;
                e4 = verify_agreement(&net, joint.t1, joint.t2, &Rect::square(z, rho));
            }
        }
        rec.rehits = joint.rehits;

        if rehit_e2 {
            self.note("E2", "rehit", s, None);
        }
        self.note("E2", if e2 { "hold" } else { "fail" }, s, Some(0.6 * s));
        if !e2 {
            rec.outcome = AttemptOutcome::Failed(Event::E2);
            return Ok(rec);
        }
        self.note("E3", if e3 { "hold" } else { "fail" }, s, Some(0.5 * s));
        if !e3 {
            rec.outcome = AttemptOutcome::Failed(Event::E3);
            return Ok(rec);
        }
        self.note("E4", if e4 { "hold" } else { "fail" }, s, Some(rho));
        rec.outcome = if e4 { AttemptOutcome::Success } else { AttemptOutcome::Failed(Event::E4) };
        Ok(rec)
    }

    /// Repeated base couplings with shrinking scale. `k_start` is the
    /// isolation exponent at reference scale `r` before the first attempt.
    fn iterate(
        &mut self,
        t1: &mut SpanningTree,
        t2: &mut SpanningTree,
        z: Point,
        r: f64,
        k_start: u32,
        first_scale: f64,
    ) -> Result<Iterated, UstError> {
        let mut out = Iterated {
            success: false,
            aborted: false,
            failed: None,
            attempts: Vec::new(),
            increments: Vec::new(),
            k: k_start,
            agreement_radius: 0.0,
        };
        let mut scale = first_scale;
        loop {
            self.attempt += 1;
            let rec = self.attempt(t1, t2, z, scale)?;
            let outcome = rec.outcome;
            out.attempts.push(rec);
            match outcome {
                AttemptOutcome::Success => {
                    out.success = true;
                    out.agreement_radius = 0.1 * scale;
                    self.note("iterate", "success", scale, Some(0.1 * scale));
                    return Ok(out);
                }
                AttemptOutcome::Vacuous => {
                    out.aborted = true;
                    self.note("iterate", "abort-vacuous", scale, None);
                    return Ok(out);
                }
                AttemptOutcome::Failed(e) => {
                    out.failed = Some(e);
                    let Some(k) = isolation(&self.net, &[&*t1, &*t2], z, r).filter(|&k| k > out.k) else {
                        out.aborted = true;
                        self.note("iterate", "abort-no-isolation", scale, None);
                        return Ok(out);
                    };
                    out.increments.push(k - out.k);
                    out.k = k;
                    let iso = 6f64.powi(-(k as i32)) * r;
                    self.note("iterate", "isolation", scale, Some(iso));
                    if iso < self.p.c0 * self.p.r0 {
                        out.aborted = true;
                        self.note("iterate", "abort", scale, Some(iso));
                        return Ok(out);
                    }
                    scale = iso / 2.0;
                }
            }
        }
    }
}

fn check_doubled_box(d1: &WiredGraph, d2: &WiredGraph, z: Point, r: f64) -> Result<(), UstError> {
    if !(r > 0.0) {
        return Err(UstError::Domain(format!("scale {r} must be positive")));
    }
    let bx = Rect::square(z, 2.0 * r);
    if !interior_box(d1, &bx) || !interior_box(d2, &bx) {
        return Err(UstError::Domain(format!("the box of half-side {} around {z:?} leaves a domain", 2.0 * r)));
    }
    Ok(())
}

fn state_from(ctx: Ctx, z: Point, r: f64, it: Iterated, t1: SpanningTree, t2: SpanningTree) -> CouplingState {
    let stage = if it.success {
        Stage::Success
    } else if it.aborted {
        Stage::Aborted
    } else {
        Stage::Iterating
    };
    CouplingState {
        z,
        r,
        c0: ctx.p.c0,
        r0: ctx.p.r0,
        stage,
        failed: if it.success { None } else { it.failed },
        n: it.attempts.len(),
        i_z: it.increments.iter().sum(),
        j_z: 0,
        attempts: it.attempts,
        increments: it.increments,
        agreement_radius: it.agreement_radius,
        tree: t1,
        other: t2,
        transcript: ctx.log,
    }
}

/// A single base coupling at scale `r` between fresh wired trees of `d1`
/// and `d2` (one ambient graph). Empty annuli are an error.
pub fn base_coupling(
    d1: &WiredGraph,
    d2: &WiredGraph,
    z: Point,
    r: f64,
    params: CouplingParams,
    seed: u64,
) -> Result<CouplingState, UstError> {
    check_doubled_box(d1, d2, z, r)?;
    let mut ctx = Ctx::new(d1, d2, params, seed)?;
    let (mut t1, mut t2) = (SpanningTree::empty(d1.len()), SpanningTree::empty(d1.len()));
    ctx.attempt = 1;
    let rec = ctx.attempt(&mut t1, &mut t2, z, r)?;
    let outcome = rec.outcome;
    if outcome == AttemptOutcome::Vacuous {
        let stage = if rec.w1.is_none() { "E1" } else { "E2" };
        return Err(UstError::Vacuous { stage, scale: r });
    }
    let it = Iterated {
        success: outcome == AttemptOutcome::Success,
        aborted: false,
        failed: match outcome {
            AttemptOutcome::Failed(e) => Some(e),
            _ => None,
        },
        attempts: vec![rec],
        increments: Vec::new(),
        k: 0,
        agreement_radius: if outcome == AttemptOutcome::Success { 0.1 * r } else { 0.0 },
    };
    let mut st = state_from(ctx, z, r, it, t1, t2);
    st.stage = match outcome {
        AttemptOutcome::Success => Stage::Success,
        AttemptOutcome::Failed(Event::E1) => Stage::E1,
        AttemptOutcome::Failed(Event::E2) => Stage::E2,
        AttemptOutcome::Failed(Event::E3) => Stage::E3,
        AttemptOutcome::Failed(Event::E4) => Stage::E4,
        AttemptOutcome::Vacuous => unreachable!(),
    };
    Ok(st)
}

/// Base couplings at scales `r`, then `6^{-K} r / 2` after each failure
/// (`K` the current isolation exponent), until success or abort.
pub fn iterated_coupling(
    d1: &WiredGraph,
    d2: &WiredGraph,
    z: Point,
    r: f64,
    params: CouplingParams,
    seed: u64,
) -> Result<CouplingState, UstError> {
    check_doubled_box(d1, d2, z, r)?;
    let mut ctx = Ctx::new(d1, d2, params, seed)?;
    let (mut t1, mut t2) = (SpanningTree::empty(d1.len()), SpanningTree::empty(d1.len()));
    let it = ctx.iterate(&mut t1, &mut t2, z, r, 0, r)?;
    if it.attempts.len() == 1 && it.attempts[0].outcome == AttemptOutcome::Vacuous {
        let stage = if it.attempts[0].w1.is_none() { "E1" } else { "E2" };
        return Err(UstError::Vacuous { stage, scale: r });
    }
    Ok(state_from(ctx, z, r, it, t1, t2))
}

/// Couples a wired tree of `d1` with one fresh wired tree of `d2` per point.
/// Branches from a circuit of `A(z_i, r, 1.1 r)` around each point come first; each
/// point then runs an iterated coupling from scale `6^{-J} r / 2`.
pub fn full_coupling(
    d1: &WiredGraph,
    d2: &WiredGraph,
    points: &[Point],
    r: f64,
    params: CouplingParams,
    seed: u64,
) -> Result<FullCoupling, UstError> {
    for (i, &z) in points.iter().enumerate() {
        check_doubled_box(d1, d2, z, r)?;
        for &w in &points[..i] {
            if z.dist(w) <= 2.0 * r {
                return Err(UstError::Domain(format!("points {w:?} and {z:?} closer than 2r")));
            }
        }
    }
    let mut ctx = Ctx::new(d1, d2, params, seed)?;
    let net = ctx.net.clone();
    let n = d1.len();
    let mut tree = SpanningTree::empty(n);
    let mut missing = Vec::new();

    for (i, &z) in points.iter().enumerate() {
        ctx.point = i;
        let Some(ring) = circuit(&net, z, r, 1.1 * r) else {
            ctx.note("circuit", "none", r, Some(1.1 * r));
            missing.push(i);
            continue;
        };
        for &v in &ring {
            grow(d1, &mut tree, v, &mut ctx.rng, params.step_cap, &mut ctx.er1)?;
        }
        ctx.note("circuit", &format!("{} vertices", ring.len()), r, Some(1.1 * r));
    }

    let mut coupled = Vec::with_capacity(points.len());
    let mut records = Vec::with_capacity(points.len());
    for (i, &z) in points.iter().enumerate() {
        ctx.point = i;
        ctx.attempt = 0;
        let mut other = SpanningTree::empty(n);
        let mut rec =
            PointRecord { z, j_z: 0, i_z: 0, n: 0, increments: Vec::new(), success: false, attempts: Vec::new() };
        match isolation(&net, &[&tree], z, r).filter(|_| !missing.contains(&i)) {
            None => ctx.note("start", "abort-no-isolation", r, None),
            Some(j) => {
                rec.j_z = j;
                let iso = 6f64.powi(-(j as i32)) * r;
                ctx.note("start", "isolation", r, Some(iso));
                if iso < params.c0 * params.r0 {
                    ctx.note("start", "abort", r, Some(iso));
                } else {
                    let it = ctx.iterate(&mut tree, &mut other, z, r, j, iso / 2.0)?;
                    rec.i_z = it.k - j;
                    rec.n = it.attempts.len();
                    rec.increments = it.increments;
                    rec.success = it.success;
                    rec.attempts = it.attempts;
                }
            }
        }
        coupled.push(other);
        records.push(rec);
    }

    if params.complete_trees {
        complete_tree(d1, &mut tree, &mut ctx.rng)?;
        for t in coupled.iter_mut() {
            complete_tree(d2, t, &mut ctx.rng)?;
        }
    }

    let radius = if records.iter().all(|p| p.success) && !records.is_empty() {
        let i = records.iter().map(|p| p.j_z + p.i_z).max().unwrap_or(0);
        0.05 * 6f64.powi(-(i as i32)) * r
    } else {
        0.0
    };
    let agreement = points
        .iter()
        .zip(&coupled)
        .map(|(&z, t)| radius > 0.0 && verify_agreement(&net, &tree, t, &Rect::square(z, radius)))
        .collect();
    Ok(FullCoupling { tree, coupled, r, radius, points: records, agreement, transcript: ctx.log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::generate_square_lattice;

    fn domains(delta: f64, d: f64, big: f64) -> (WiredGraph, WiredGraph) {
        let g = generate_square_lattice(Rect::square(Point::ORIGIN, big), delta).unwrap();
        let d2 = WiredGraph::from_rect(&g, &Rect::square(Point::ORIGIN, big)).unwrap();
        let d1 = d2.with_rect(&Rect::square(Point::ORIGIN, d)).unwrap();
        (d1, d2)
    }

    #[test]
    fn coupling_with_itself_never_disagrees() {
        let (d1, _) = domains(1.0 / 32.0, 1.0, 1.0);
        let p = CouplingParams { joint_first_branch: true, ..Default::default() };
        let mut wins = 0;
        for seed in 0..12 {
            let st = base_coupling(&d1, &d1, Point::ORIGIN, 0.45, p, seed).unwrap();
            // only the avoidance event can fail
            assert!(matches!(st.stage, Stage::Success | Stage::E1), "{:?}", st.stage);
            assert_eq!(st.tree, st.other);
            let it = iterated_coupling(&d1, &d1, Point::ORIGIN, 0.45, p, seed).unwrap();
            if it.attempts[0].outcome == AttemptOutcome::Success {
                assert_eq!((it.n, it.i_z, it.stage), (1, 0, Stage::Success));
                wins += 1;
            }
        }
        assert!(wins > 0);
    }

    #[test]
    fn annuli_nest() {
        let radii = [0.1, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9];
        assert!(radii.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn huge_cutoff_aborts_after_first_failure() {
        let (d1, d2) = domains(1.0 / 16.0, 1.5, 3.0);
        let p = CouplingParams { r0: 1e9, ..Default::default() };
        let mut seen = 0;
        for seed in 0..40 {
            let st = iterated_coupling(&d1, &d2, Point::ORIGIN, 0.5, p, seed).unwrap();
            if st.stage != Stage::Success {
                assert_eq!(st.n, 1);
                assert_eq!(st.stage, Stage::Aborted);
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn empty_annulus_is_an_error() {
        let (d1, d2) = domains(0.25, 2.0, 3.0);
        assert!(matches!(
            base_coupling(&d1, &d2, Point::ORIGIN, 0.3, CouplingParams::default(), 1),
            Err(UstError::Vacuous { .. })
        ));
    }

    #[test]
    fn successful_full_coupling_agrees_exactly() {
        let delta = 1.0 / 64.0;
        let (d1, _) = domains(delta, 5.0, 5.0);
        let p = CouplingParams { joint_first_branch: true, ..Default::default() };
        let mut wins = 0;
        for seed in 0..12 {
            let fc = full_coupling(&d1, &d1, &[Point::ORIGIN], 2.4, p, seed).unwrap();
            if fc.success() {
                wins += 1;
                assert!(fc.agreement.iter().all(|&a| a));
                assert!(fc.radius <= 0.05 * 2.4);
            } else {
                assert_eq!(fc.radius, 0.0);
                assert!(fc.agreement.iter().all(|&a| !a));
            }
        }
        assert!(wins > 0);
    }

    #[test]
    fn completed_trees_span() {
        let (d1, d2) = domains(1.0 / 16.0, 1.0, 1.5);
        let p = CouplingParams { complete_trees: true, r0: 1.0 / 16.0, ..Default::default() };
        let fc = full_coupling(&d1, &d2, &[Point::ORIGIN], 0.45, p, 5).unwrap();
        fc.tree.check_spanning(&d1).unwrap();
        fc.coupled[0].check_spanning(&d2).unwrap();
    }

    #[test]
    fn bad_point_layouts_rejected() {
        let (d1, d2) = domains(1.0 / 16.0, 1.0, 2.0);
        let p = CouplingParams::default();
        assert!(full_coupling(&d1, &d2, &[Point::new(0.8, 0.0)], 0.3, p, 1).is_err());
        assert!(full_coupling(&d1, &d2, &[Point::new(-0.2, 0.0), Point::new(0.2, 0.0)], 0.3, p, 1).is_err());
    }
}
