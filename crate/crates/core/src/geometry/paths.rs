use std::borrow::Cow;
use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{CellState, CoarseField};
use crate::geom::Rect;
use crate::graph::{EmbeddedGraph, VertexId};

use super::{mask_of, BallIndex, GeometryError};

/// Verdict of the boundary containment check: for `A` inside a ball whose
/// vertex boundary is connected and meets the ball's boundary,
/// `A ⊆ B(v, 2k)` for every interior-boundary vertex `v`, `k = |∂_int A|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainmentVerdict {
    pub hypothesis: bool,
    pub k: usize,
    /// `None` when the hypothesis fails.
    pub holds: Option<bool>,
    /// First violating `(v, w, d(v, w))` found.
    pub violation: Option<(VertexId, VertexId, u32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterReport {
    /// Largest graph distance in `g` between two vertices of `A`.
    pub graph_diameter: u32,
    /// Largest Euclidean distance between two vertices of `A`.
    pub euclidean_diameter: f64,
    pub containment: Option<ContainmentVerdict>,
}

/// Diameters of `A`; with a ball, also the boundary containment check.
pub fn diameter_checks(
    g: &EmbeddedGraph,
    a: &[VertexId],
    ball: Option<&BallIndex>,
) -> Result<DiameterReport, GeometryError> {
    if a.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let in_a = mask_of(g.len(), a)?;
    let (sub, _) = g.induced(&in_a);
    if !sub.is_connected() {
        return Err(GeometryError::Disconnected);
    }
    let mut set = a.to_vec();
    set.sort_unstable();
    set.dedup();
    let mut graph_diameter = 0;
    let mut euclidean_diameter: f64 = 0.0;
    for (i, &u) in set.iter().enumerate() {
        let dist = g.bfs(u);
        for &w in &set[i + 1..] {
            graph_diameter = graph_diameter.max(dist[w]);
            euclidean_diameter = euclidean_diameter.max(g.pos(u).dist(g.pos(w)));
        }
    }
    let containment = ball.map(|b| containment(g, &set, &in_a, b));
    Ok(DiameterReport { graph_diameter, euclidean_diameter, containment })
}

fn containment(g: &EmbeddedGraph, set: &[VertexId], in_a: &[bool], ball: &BallIndex) -> ContainmentVerdict {
    containment_with(g, set, in_a, &ball.mask(g.len()), |v| Cow::Owned(g.bfs(v)))
}

fn containment_with<'d>(
    g: &EmbeddedGraph,
    set: &[VertexId],
    in_a: &[bool],
    in_b: &[bool],
    dist_from: impl Fn(VertexId) -> Cow<'d, [u32]>,
) -> ContainmentVerdict {
    let boundary_v: Vec<VertexId> = set.iter().copied().filter(|&v| g.neighbors(v).iter().any(|&w| !in_a[w])).collect();
    let interior: Vec<VertexId> =
        boundary_v.iter().copied().filter(|&v| g.neighbors(v).iter().any(|&w| in_b[w] && !in_a[w])).collect();
    let k = interior.len();
    let inside = set.iter().all(|&v| in_b[v]);
    let bv_connected = !boundary_v.is_empty() && list_connected(g, &boundary_v);
    let touches = boundary_v.iter().any(|&v| g.neighbors(v).iter().any(|&w| !in_b[w]));
    let hypothesis = inside && bv_connected && touches;
    if !hypothesis {
        return ContainmentVerdict { hypothesis, k, holds: None, violation: None };
    }
    let bound = 2 * k as u32;
    for &v in &interior {
        let dist = dist_from(v);
        if let Some(&w) = set.iter().find(|&&w| dist[w] > bound) {
            return ContainmentVerdict { hypothesis, k, holds: Some(false), violation: Some((v, w, dist[w])) };
        }
    }
    ContainmentVerdict { hypothesis, k, holds: Some(true), violation: None }
}

/// Whether the subgraph induced by the sorted, non-empty `verts` is connected.
fn list_connected(g: &EmbeddedGraph, verts: &[VertexId]) -> bool {
    let mut seen = vec![false; verts.len()];
    seen[0] = true;
    let mut count = 1;
    let mut stack = vec![verts[0]];
    while let Some(v) = stack.pop() {
        for &w in g.neighbors(v) {
            if let Ok(i) = verts.binary_search(&w) {
                if !seen[i] {
                    seen[i] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
    }
    count == verts.len()
}

/// Containment checks for many subsets of one ball, with BFS distances from
/// every ball vertex computed once (memory `|B|·|V|`).
pub struct ContainmentIndex<'a> {
    g: &'a EmbeddedGraph,
    in_b: Vec<bool>,
    dist: HashMap<VertexId, Vec<u32>>,
}

impl<'a> ContainmentIndex<'a> {
    pub fn new(g: &'a EmbeddedGraph, ball: &BallIndex) -> Result<Self, GeometryError> {
        if ball.center >= g.len() {
            return Err(GeometryError::VertexOutOfRange(ball.center));
        }
        let dist = ball.vertices().into_iter().map(|v| (v, g.bfs(v))).collect();
        Ok(ContainmentIndex { g, in_b: ball.mask(g.len()), dist })
    }

    /// Same verdict as the containment part of [`diameter_checks`]; `a` must
    /// induce a connected subgraph.
    pub fn check(&self, a: &[VertexId]) -> Result<ContainmentVerdict, GeometryError> {
        if a.is_empty() {
            return Err(GeometryError::EmptySet);
        }
        let in_a = mask_of(self.g.len(), a)?;
        let mut set = a.to_vec();
        set.sort_unstable();
        set.dedup();
        let g = self.g;
        Ok(containment_with(g, &set, &in_a, &self.in_b, |v| match self.dist.get(&v) {
            Some(d) => Cow::Borrowed(d.as_slice()),
            None => Cow::Owned(g.bfs(v)),
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
pub enum Refusal {
    #[error("cells ({0}, {1}) and ({2}, {3}) are not adjacent")]
    NotAdjacent(i64, i64, i64, i64),
    #[error("cell ({0}, {1}) is not A-red")]
    NotARed(i64, i64),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("vertex {0} lies in a sub-box closer than s/4 to the rectangle boundary")]
    TooCloseToBoundary(VertexId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedPath {
    pub vertices: Vec<VertexId>,
    /// `800·A·s²`.
    pub cap: f64,
    pub within_cap: bool,
    /// Vertices of `g` inside the union rectangle.
    pub rect_vertex_count: usize,
}

/// Shortest path in `g` inside the union of two adjacent A-red cells between
/// two vertices whose sub-boxes keep distance `s/4` from its boundary.
/// `Ok(None)` means the hypotheses hold but no such path exists.
pub fn red_path_bound(
    field: &CoarseField,
    g: &EmbeddedGraph,
    cell1: (i64, i64),
    cell2: (i64, i64),
    start: VertexId,
    end: VertexId,
) -> Result<Option<RedPath>, Refusal> {
    let ((i1, j1), (i2, j2)) = (cell1, cell2);
    if (i1 - i2).abs() + (j1 - j2).abs() != 1 {
        return Err(Refusal::NotAdjacent(i1, j1, i2, j2));
    }
    for (i, j) in [cell1, cell2] {
        if field.state(i, j) != Some(CellState::ARed) {
            return Err(Refusal::NotARed(i, j));
        }
    }
    let (r1, r2) = (field.cell_rect(i1, j1), field.cell_rect(i2, j2));
    let x0 = r1.x_min().min(r2.x_min());
    let x1 = r1.x_max().max(r2.x_max());
    let y0 = r1.y_min().min(r2.y_min());
    let y1 = r1.y_max().max(r2.y_max());
    let rect = Rect::new(crate::geom::Point::new(0.5 * (x0 + x1), 0.5 * (y0 + y1)), 0.5 * (x1 - x0), 0.5 * (y1 - y0));
    let s = field.s;
    let h = s / 10.0;
    for v in [start, end] {
        if v >= g.len() {
            return Err(Refusal::VertexOutOfRange(v));
        }
        let p = g.pos(v);
        let (fx, fy) = ((p.x / h).floor(), (p.y / h).floor());
        let margin = (fx * h - rect.x_min())
            .min(rect.x_max() - (fx + 1.0) * h)
            .min(fy * h - rect.y_min())
            .min(rect.y_max() - (fy + 1.0) * h);
        if margin < s / 4.0 - 1e-12 {
            return Err(Refusal::TooCloseToBoundary(v));
        }
    }
    let allowed: Vec<bool> = g.positions().iter().map(|&p| rect.contains(p)).collect();
    let rect_vertex_count = allowed.iter().filter(|&&b| b).count();
    let cap = 800.0 * field.a * s * s;
    let mut prev = vec![usize::MAX; g.len()];
    let mut queue = VecDeque::from([start]);
    prev[start] = start;
    while let Some(v) = queue.pop_front() {
        if v == end {
            break;
        }
        for &w in g.neighbors(v) {
            if allowed[w] && prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    if prev[end] == usize::MAX {
        return Ok(None);
    }
    let mut vertices = vec![end];
    while *vertices.last().expect("nonempty") != start {
        vertices.push(prev[*vertices.last().expect("nonempty")]);
    }
    vertices.reverse();
    let within_cap = vertices.len() as f64 <= cap;
    Ok(Some(RedPath { vertices, cap, within_cap, rect_vertex_count }))
}
