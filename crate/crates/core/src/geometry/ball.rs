use serde::{Deserialize, Serialize};

use crate::geom::{Point, Rect};
use crate::graph::{EmbeddedGraph, VertexId};

use super::GeometryError;

/// Graph-distance ball `B(center, r)` with exact BFS distances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallIndex {
    pub center: VertexId,
    pub radius: u32,
    /// `(vertex, distance)` sorted by vertex id.
    pub members: Vec<(VertexId, u32)>,
}

impl BallIndex {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        self.members.iter().map(|&(v, _)| v).collect()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search_by_key(&v, |&(u, _)| u).is_ok()
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &(v, _) in &self.members {
            m[v] = true;
        }
        m
    }

    /// Members at distance exactly `radius`.
    pub fn sphere(&self) -> Vec<VertexId> {
        self.members.iter().filter(|&&(_, d)| d == self.radius).map(|&(v, _)| v).collect()
    }
}

pub fn graph_ball(g: &EmbeddedGraph, center: VertexId, r: u32) -> Result<BallIndex, GeometryError> {
    if center >= g.len() {
        return Err(GeometryError::VertexOutOfRange(center));
    }
    let dist = g.bfs(center);
    let members = dist.iter().enumerate().filter(|&(_, &d)| d <= r).map(|(v, &d)| (v, d)).collect();
    Ok(BallIndex { center, radius: r, members })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InclusionVerdict {
    /// Vertex closest to the origin.
    pub origin: VertexId,
    /// Both inclusions hold for the supplied constant.
    pub holds: bool,
    /// Infimum of constants for which both inclusions hold; `None` when a vertex
    /// of the box is unreachable from the origin vertex.
    pub fitted: Option<f64>,
    /// Largest graph distance from the origin vertex to a vertex in the box.
    pub max_inside: Option<u32>,
    /// Smallest graph distance to a vertex outside the box.
    pub min_outside: Option<u32>,
}

/// Checks `B(o, n/C) ⊆ Λ_n ⊆ B(o, C n)` on the vertex sets of `g`.
pub fn inclusion_check(g: &EmbeddedGraph, n: f64, c_euc: f64) -> Option<InclusionVerdict> {
    let origin = g.closest_vertex(Point::ORIGIN)?;
    let bx = Rect::square(Point::ORIGIN, n);
    let dist = g.bfs(origin);
    let mut max_inside = Some(0u32);
    let mut min_outside: Option<u32> = None;
    for (v, &d) in dist.iter().enumerate() {
        if bx.contains(g.pos(v)) {
            max_inside = match (max_inside, d) {
                (_, u32::MAX) | (None, _) => None,
                (Some(m), d) => Some(m.max(d)),
            };
        } else if d != u32::MAX {
            min_outside = Some(min_outside.map_or(d, |m| m.min(d)));
        }
    }
    let inner_ok = min_outside.is_none_or(|d| n / c_euc < f64::from(d));
    let outer_ok = max_inside.is_some_and(|d| f64::from(d) <= c_euc * n);
    let fitted = max_inside.map(|d| {
        let need_outer = f64::from(d) / n;
        let need_inner = min_outside.map_or(0.0, |o| n / f64::from(o));
        need_outer.max(need_inner)
    });
    Some(InclusionVerdict { origin, holds: inner_ok && outer_ok, fitted, max_inside, min_outside })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::generate_square_lattice;

    fn grid(n: f64) -> EmbeddedGraph {
        generate_square_lattice(Rect::square(Point::ORIGIN, n), 1.0).unwrap()
    }

    #[test]
    fn radius_zero_is_center() {
        let g = grid(2.0);
        let b = graph_ball(&g, 12, 0).unwrap();
        assert_eq!(b.vertices(), vec![12]);
    }

    #[test]
    fn middle_of_five_by_five() {
        let g = grid(2.0);
        assert_eq!(graph_ball(&g, 12, 1).unwrap().len(), 5);
        assert_eq!(graph_ball(&g, 12, 2).unwrap().len(), 13);
    }

    #[test]
    fn lattice_inclusion_constant_two() {
        let g = grid(12.0);
        for n in 1..=10 {
            let v = inclusion_check(&g, n as f64, 2.0).unwrap();
            assert!(v.holds, "n = {n}");
            assert_eq!(v.fitted, Some(2.0));
        }
    }

    #[test]
    fn unreachable_vertex_has_no_constant() {
        let pos = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let g = EmbeddedGraph::from_edges(pos, &[(0, 1)]).unwrap();
        let v = inclusion_check(&g, 2.0, 1e6).unwrap();
        assert!(!v.holds);
        assert_eq!(v.fitted, None);
    }
}
