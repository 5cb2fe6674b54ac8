use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{EmbeddedGraph, VertexId};
use crate::rng::rng_from_seed;

use super::{BallIndex, GeometryError};

/// Largest subset size supported by exhaustive enumeration.
pub const EXHAUSTIVE_CAP: usize = 14;

/// Calls `f` once for every connected vertex subset of size `1..=max_size`
/// whose smallest vertex is `root`. Subsets are passed unsorted.
fn enumerate_from_root(
    adj: &[Vec<usize>],
    allowed: Option<&[bool]>,
    max_size: usize,
    root: usize,
    f: &mut dyn FnMut(&[usize]),
) {
    if max_size == 0 || allowed.is_some_and(|a| !a[root]) {
        return;
    }
    let ok = |u: usize| u > root && allowed.is_none_or(|a| a[u]);
    let mut near = vec![0u32; adj.len()];
    let mut sub = vec![root];
    near[root] += 1;
    for &u in &adj[root] {
        near[u] += 1;
    }
    let ext: Vec<usize> = adj[root].iter().copied().filter(|&u| ok(u)).collect();
    extend(adj, &ok, max_size, &mut sub, ext, &mut near, f);
}

fn extend(
    adj: &[Vec<usize>],
    ok: &dyn Fn(usize) -> bool,
    max_size: usize,
    sub: &mut Vec<usize>,
    mut ext: Vec<usize>,
    near: &mut [u32],
    f: &mut dyn FnMut(&[usize]),
) {
    f(sub);
    if sub.len() == max_size {
        return;
    }
    while let Some(w) = ext.pop() {
        let mut next = ext.clone();
        for &u in &adj[w] {
            if near[u] == 0 && ok(u) {
                next.push(u);
            }
        }
        sub.push(w);
        near[w] += 1;
        for &u in &adj[w] {
            near[u] += 1;
        }
        extend(adj, ok, max_size, sub, next, near, f);
        for &u in &adj[w] {
            near[u] -= 1;
        }
        near[w] -= 1;
        sub.pop();
    }
}

/// Calls `f` once for every connected induced subset of `g` with at most
/// `max_size` vertices, restricted to `allowed` when given.
pub fn for_each_connected_subset(
    g: &EmbeddedGraph,
    allowed: Option<&[bool]>,
    max_size: usize,
    mut f: impl FnMut(&[VertexId]),
) {
    for root in 0..g.len() {
        enumerate_from_root(g.adjacency(), allowed, max_size, root, &mut f);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoRow {
    pub subset: Vec<VertexId>,
    pub size: usize,
    pub vol_e: usize,
    pub boundary_e: usize,
    pub boundary_v: usize,
    pub boundary_int: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum IsoMode {
    Exhaustive,
    /// Simulated annealing; the result is an upper bound on the constant only.
    Annealing {
        restarts: usize,
        steps: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoOptions {
    pub max_size: usize,
    pub mode: IsoMode,
    pub keep_rows: bool,
}

impl IsoOptions {
    pub fn exhaustive(max_size: usize) -> Self {
        IsoOptions { max_size, mode: IsoMode::Exhaustive, keep_rows: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoReport {
    pub ball_center: VertexId,
    pub ball_radius: u32,
    pub ball_size: usize,
    pub ball_vol_e: usize,
    pub max_size: usize,
    pub heuristic: bool,
    pub subsets_evaluated: u64,
    /// Minimum of `i_H(A)` over admissible subsets seen.
    pub min_ratio: Option<f64>,
    pub minimizer: Vec<VertexId>,
    /// Largest `C_I` with `i_H(A) ≥ C_I / sqrt(|A|_E)` on every admissible subset seen.
    pub fitted_c_i: Option<f64>,
    pub rows: Vec<IsoRow>,
}

impl IsoReport {
    pub fn csv_header() -> &'static str {
        "size,vol_E,boundary_E,boundary_V,boundary_int,ratio"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::csv_header());
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.size, r.vol_e, r.boundary_e, r.boundary_v, r.boundary_int, r.ratio
            ));
        }
        out
    }
}

/// Local view of a ball: induced subgraph plus the map to global ids.
struct BallGraph<'a> {
    g: &'a EmbeddedGraph,
    h: EmbeddedGraph,
    ids: Vec<VertexId>,
    total_vol: usize,
}

#[derive(Default)]
struct Acc {
    evaluated: u64,
    best: Option<(f64, Vec<VertexId>)>,
    c_i: Option<f64>,
    rows: Vec<IsoRow>,
}

impl Acc {
    fn merge(mut self, other: Acc) -> Acc {
        self.evaluated += other.evaluated;
        self.best = match (self.best, other.best) {
            (Some(a), Some(b)) => Some(if better(&b, &a) { b } else { a }),
            (a, b) => a.or(b),
        };
        self.c_i = match (self.c_i, other.c_i) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.rows.extend(other.rows);
        self
    }
}

fn better(a: &(f64, Vec<VertexId>), b: &(f64, Vec<VertexId>)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

impl BallGraph<'_> {
    /// Evaluates a local subset; `None` if it violates the admissibility constraints.
    fn evaluate(&self, local: &[usize], in_a: &mut [bool], keep_row: bool) -> Option<(f64, usize, Option<IsoRow>)> {
        let h = &self.h;
        let mut vol = 0;
        let mut be = 0;
        for &v in local {
            vol += h.degree(v);
            be += h.neighbors(v).iter().filter(|&&w| !in_a[w]).count();
        }
        if vol == 0 || 2 * vol > self.total_vol || !complement_connected(h, in_a, local.len()) {
            return None;
        }
        let ratio = be as f64 / vol as f64;
        let row = keep_row.then(|| {
            let mut subset: Vec<VertexId> = local.iter().map(|&v| self.ids[v]).collect();
            subset.sort_unstable();
            let mut global_in = std::collections::HashSet::with_capacity(subset.len());
            global_in.extend(subset.iter().copied());
            let bv = subset.iter().filter(|&&v| self.g.neighbors(v).iter().any(|w| !global_in.contains(w))).count();
            let bint = local.iter().filter(|&&v| h.neighbors(v).iter().any(|&w| !in_a[w])).count();
            IsoRow { size: subset.len(), subset, vol_e: vol, boundary_e: be, boundary_v: bv, boundary_int: bint, ratio }
        });
        Some((ratio, vol, row))
    }

    fn record(&self, acc: &mut Acc, local: &[usize], in_a: &mut [bool], keep_rows: bool) {
        for &v in local {
            in_a[v] = true;
        }
        if let Some((ratio, vol, row)) = self.evaluate(local, in_a, keep_rows) {
            acc.evaluated += 1;
            let c = ratio * (vol as f64).sqrt();
            acc.c_i = Some(acc.c_i.map_or(c, |x: f64| x.min(c)));
            let better_now = acc.best.as_ref().is_none_or(|(r, _)| ratio <= *r);
            if better_now {
                let mut ids: Vec<VertexId> = local.iter().map(|&v| self.ids[v]).collect();
                ids.sort_unstable();
                let cand = (ratio, ids);
                if acc.best.as_ref().is_none_or(|b| better(&cand, b)) {
                    acc.best = Some(cand);
                }
            }
            if let Some(row) = row {
                acc.rows.push(row);
            }
        }
        for &v in local {
            in_a[v] = false;
        }
    }
}

fn complement_connected(h: &EmbeddedGraph, in_a: &[bool], a_len: usize) -> bool {
    let n = h.len();
    let rest = n - a_len;
    if rest == 0 {
        return false;
    }
    let Some(start) = (0..n).find(|&v| !in_a[v]) else {
        return false;
    };
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in h.neighbors(v) {
            if !in_a[w] && !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == rest
}

/// Minimum of the edge-isoperimetric ratio over connected subsets of the ball
/// with connected complement and at most half the ball's edge volume.
pub fn isoperimetric_profile(
    g: &EmbeddedGraph,
    ball: &BallIndex,
    opts: &IsoOptions,
) -> Result<IsoReport, GeometryError> {
    if ball.center >= g.len() {
        return Err(GeometryError::VertexOutOfRange(ball.center));
    }
    let (h, ids) = g.induced(&ball.mask(g.len()));
    let total_vol = 2 * h.edge_count();
    let bg = BallGraph { g, h, ids, total_vol };
    let acc = match opts.mode {
        IsoMode::Exhaustive => {
            if opts.max_size > EXHAUSTIVE_CAP {
                return Err(GeometryError::Mode { requested: opts.max_size, cap: EXHAUSTIVE_CAP });
            }
            (0..bg.h.len())
                .into_par_iter()
                .map(|root| {
                    let mut acc = Acc::default();
                    let mut in_a = vec![false; bg.h.len()];
                    enumerate_from_root(bg.h.adjacency(), None, opts.max_size, root, &mut |s| {
                        bg.record(&mut acc, s, &mut in_a, opts.keep_rows)
                    });
                    acc
                })
                .collect::<Vec<_>>()
                .into_iter()
                .fold(Acc::default(), Acc::merge)
        }
        IsoMode::Annealing { restarts, steps, seed } => anneal(&bg, opts, restarts, steps, seed),
    };
    let (min_ratio, minimizer) = match acc.best {
        Some((r, s)) => (Some(r), s),
        None => (None, Vec::new()),
    };
    Ok(IsoReport {
        ball_center: ball.center,
        ball_radius: ball.radius,
        ball_size: bg.h.len(),
        ball_vol_e: total_vol,
        max_size: opts.max_size,
        heuristic: matches!(opts.mode, IsoMode::Annealing { .. }),
        subsets_evaluated: acc.evaluated,
        min_ratio,
        minimizer,
        fitted_c_i: acc.c_i,
        rows: acc.rows,
    })
}

fn induced_connected(h: &EmbeddedGraph, in_a: &[bool], set: &[usize]) -> bool {
    let Some(&start) = set.first() else {
        return false;
    };
    let mut seen = std::collections::HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in h.neighbors(v) {
            if in_a[w] && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == set.len()
}

fn anneal(bg: &BallGraph, opts: &IsoOptions, restarts: usize, steps: usize, seed: u64) -> Acc {
    let h = &bg.h;
    let n = h.len();
    let mut acc = Acc::default();
    if n == 0 {
        return acc;
    }
    let mut rng = rng_from_seed(seed);
    let mut in_a = vec![false; n];
    let score = |set: &[usize], in_a: &mut [bool]| -> Option<f64> {
        if set.len() > opts.max_size.max(1) {
            return None;
        }
        let r = bg.evaluate(set, in_a, false)?;
        Some(r.0)
    };
    for _ in 0..restarts.max(1) {
        in_a.iter_mut().for_each(|b| *b = false);
        let start = rng.random_range(0..n);
        let mut set = vec![start];
        in_a[start] = true;
        let mut cur = score(&set, &mut in_a).unwrap_or(f64::INFINITY);
        bg.record(&mut acc, &set.clone(), &mut in_a.clone(), opts.keep_rows);
        for step in 0..steps {
            let temp = 0.2 * (1.0 - step as f64 / steps as f64) + 1e-4;
            let grow = rng.random::<bool>() || set.len() == 1;
            let mut cand = set.clone();
            if grow {
                let frontier: Vec<usize> =
                    set.iter().flat_map(|&v| h.neighbors(v).iter().copied()).filter(|&w| !in_a[w]).collect();
                let Some(&w) = frontier.choose(&mut rng) else {
                    continue;
                };
                cand.push(w);
            } else {
                let k = rng.random_range(0..cand.len());
                cand.swap_remove(k);
            }
            let mut cand_mask = in_a.clone();
            cand_mask.iter_mut().for_each(|b| *b = false);
            for &v in &cand {
                cand_mask[v] = true;
            }
            if !induced_connected(h, &cand_mask, &cand) {
                continue;
            }
            let Some(s) = score(&cand, &mut cand_mask) else {
                continue;
            };
            if s <= cur || rng.random::<f64>() < ((cur - s) / temp).exp() {
                for &v in &set {
                    in_a[v] = false;
                }
                set = cand;
                for &v in &set {
                    in_a[v] = true;
                }
                cur = s;
                let mut scratch = vec![false; n];
                bg.record(&mut acc, &set, &mut scratch, opts.keep_rows);
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::generate_square_lattice;
    use crate::geom::{Point, Rect};
    use crate::geometry::graph_ball;

    #[test]
    fn connected_subset_counts_on_path() {
        let pos = (0..5).map(|i| Point::new(i as f64, 0.0)).collect();
        let g = EmbeddedGraph::from_edges(pos, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let mut count = 0;
        for_each_connected_subset(&g, None, 5, |_| count += 1);
        // intervals of a 5-path
        assert_eq!(count, 15);
        let mut by_size = [0; 4];
        for_each_connected_subset(&g, None, 3, |s| by_size[s.len()] += 1);
        assert_eq!(by_size, [0, 5, 4, 3]);
    }

    #[test]
    fn connected_subset_counts_on_cycle() {
        let pos = (0..4).map(|i| Point::new(i as f64, (i % 2) as f64)).collect();
        let g = EmbeddedGraph::from_edges(pos, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let mut count = 0;
        for_each_connected_subset(&g, None, 4, |_| count += 1);
        // 4 singletons, 4 edges, 4 paths of 3, the whole cycle
        assert_eq!(count, 13);
    }

    #[test]
    fn exhaustive_cap_enforced() {
        let g = generate_square_lattice(Rect::square(Point::ORIGIN, 2.0), 1.0).unwrap();
        let ball = graph_ball(&g, 12, 2).unwrap();
        let err = isoperimetric_profile(&g, &ball, &IsoOptions::exhaustive(15)).unwrap_err();
        assert_eq!(err, GeometryError::Mode { requested: 15, cap: 14 });
    }

    #[test]
    fn report_min_equals_min_row() {
        let g = generate_square_lattice(Rect::square(Point::ORIGIN, 1.0), 1.0).unwrap();
        let ball = graph_ball(&g, 4, 2).unwrap();
        let opts = IsoOptions { keep_rows: true, ..IsoOptions::exhaustive(4) };
        let rep = isoperimetric_profile(&g, &ball, &opts).unwrap();
        let min_row = rep.rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        assert_eq!(rep.min_ratio, Some(min_row));
        assert_eq!(rep.subsets_evaluated as usize, rep.rows.len());
        let centre = rep.rows.iter().find(|r| r.subset == vec![4]).unwrap();
        assert_eq!(centre.ratio, 1.0);
    }

    #[test]
    fn annealing_never_beats_exhaustive() {
        let g = generate_square_lattice(Rect::square(Point::ORIGIN, 2.0), 1.0).unwrap();
        let ball = graph_ball(&g, 12, 2).unwrap();
        let ex = isoperimetric_profile(&g, &ball, &IsoOptions::exhaustive(6)).unwrap();
        let opts =
            IsoOptions { max_size: 6, mode: IsoMode::Annealing { restarts: 8, steps: 300, seed: 3 }, keep_rows: false };
        let an = isoperimetric_profile(&g, &ball, &opts).unwrap();
        assert!(an.heuristic);
        assert!(an.min_ratio.unwrap() >= ex.min_ratio.unwrap());
    }
}
