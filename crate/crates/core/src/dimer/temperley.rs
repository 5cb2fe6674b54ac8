use std::collections::{HashMap, VecDeque};

use crate::env::generate_square_lattice;
use crate::geom::{Point, Rect};
use crate::graph::{EmbeddedGraph, VertexId};
use crate::planar::{faces_with_outer, Face};
use crate::ust::WiredGraph;

use super::winding::turn_angle;
use super::DimerError;

/// Superposition of a plane graph and its dual. Black vertices are the primal
/// vertices `0..n` followed by one dual vertex per bounded face; white vertices
/// sit at the primal edge midpoints, one per primal edge.
#[derive(Debug, Clone)]
pub struct TemperleyanGraph {
    primal: EmbeddedGraph,
    faces: Vec<Face>,
    centroids: Vec<Point>,
    areas: Vec<f64>,
    representatives: Vec<VertexId>,
    /// Counterclockwise boundary walk.
    boundary: Vec<VertexId>,
    boundary_index: Vec<Option<usize>>,
    /// Lifted heading of the counterclockwise boundary edge leaving each boundary vertex.
    theta: Vec<f64>,
    white_pos: Vec<Point>,
    white_edge: Vec<(VertexId, VertexId)>,
    white_adj: Vec<Vec<usize>>,
    wired: WiredGraph,
}

/// The lattice `mesh·ℤ² ∩ [0,1]²`.
pub fn unit_square_lattice(mesh: f64) -> Result<EmbeddedGraph, DimerError> {
    generate_square_lattice(Rect::square(Point::new(0.5, 0.5), 0.5), mesh).map_err(|_| DimerError::Degenerate)
}

pub fn build_temperleyan(g: &EmbeddedGraph) -> Result<TemperleyanGraph, DimerError> {
    if g.edge_count() == 0 || !g.is_connected() {
        return Err(DimerError::Degenerate);
    }
    let (faces, outer) = faces_with_outer(g).ok_or(DimerError::Degenerate)?;
    let mut boundary = outer.walk.clone();
    boundary.reverse();
    let n = g.len();
    let mut boundary_index = vec![None; n];
    for (i, &v) in boundary.iter().enumerate() {
        if boundary_index[v].is_some() {
            return Err(DimerError::Pinch { vertex: v });
        }
        boundary_index[v] = Some(i);
    }
    // directed edge -> bounded face on its left
    let mut left: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    for (k, f) in faces.iter().enumerate() {
        let w = &f.walk;
        for i in 0..w.len() {
            left.insert((w[i], w[(i + 1) % w.len()]), k);
        }
    }
    let mut white_pos = Vec::new();
    let mut white_edge = Vec::new();
    let mut white_adj = Vec::new();
    for (u, v) in g.edges() {
        white_pos.push(g.pos(u).add(g.pos(v)).scale(0.5));
        white_edge.push((u, v));
        let mut nb = vec![u, v];
        for d in [(u, v), (v, u)] {
            if let Some(&k) = left.get(&d) {
                if !nb.contains(&(n + k)) {
                    nb.push(n + k);
                }
            }
        }
        white_adj.push(nb);
    }
    let centroids: Vec<Point> = faces.iter().map(|f| f.centroid(g)).collect();
    let areas = faces.iter().map(|f| f.signed_area).collect();
    let representatives = centroids.iter().map(|&c| g.closest_vertex(c).expect("non-empty graph")).collect();
    let l = boundary.len();
    let heading = |i: usize| g.pos(boundary[(i + 1) % l]).sub(g.pos(boundary[i]));
    let mut theta = Vec::with_capacity(l);
    let h0 = heading(0);
    theta.push(h0.y.atan2(h0.x));
    for i in 1..l {
        let t = theta[i - 1] + turn_angle(heading(i - 1), heading(i));
        theta.push(t);
    }
    let interior = boundary_index.iter().map(Option::is_none).collect();
    let wired = WiredGraph::new(g, interior)?;
    Ok(TemperleyanGraph {
        primal: g.clone(),
        faces,
        centroids,
        areas,
        representatives,
        boundary,
        boundary_index,
        theta,
        white_pos,
        white_edge,
        white_adj,
        wired,
    })
}

impl TemperleyanGraph {
    pub fn primal(&self) -> &EmbeddedGraph {
        &self.primal
    }

    /// Wired graph whose root is the boundary cycle.
    pub fn wired(&self) -> &WiredGraph {
        &self.wired
    }

    pub fn primal_count(&self) -> usize {
        self.primal.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn black_count(&self) -> usize {
        self.primal.len() + self.faces.len()
    }

    pub fn white_count(&self) -> usize {
        self.white_pos.len()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face_centroid(&self, f: usize) -> Point {
        self.centroids[f]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        self.areas[f]
    }

    /// Primal vertex closest to the face centroid.
    pub fn representative(&self, f: usize) -> VertexId {
        self.representatives[f]
    }

    pub fn boundary(&self) -> &[VertexId] {
        &self.boundary
    }

    pub fn boundary_position(&self, v: VertexId) -> Option<usize> {
        self.boundary_index[v]
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.boundary_index[v].is_some()
    }

    /// Lifted counterclockwise tangent heading at a boundary vertex, cut at the
    /// first vertex of the boundary walk.
    pub fn boundary_heading(&self, v: VertexId) -> Option<f64> {
        self.boundary_index[v].map(|i| self.theta[i])
    }

    pub(crate) fn boundary_direction(&self, v: VertexId) -> Option<Point> {
        let i = self.boundary_index[v]?;
        let next = self.boundary[(i + 1) % self.boundary.len()];
        Some(self.primal.pos(next).sub(self.primal.pos(v)))
    }

    pub fn white_pos(&self, w: usize) -> Point {
        self.white_pos[w]
    }

    /// Primal edge crossed at white vertex `w`.
    pub fn white_edge(&self, w: usize) -> (VertexId, VertexId) {
        self.white_edge[w]
    }

    /// Black neighbours of a white vertex: the two primal endpoints, then the
    /// dual vertices of the bounded faces on either side.
    pub fn white_neighbors(&self, w: usize) -> &[usize] {
        &self.white_adj[w]
    }

    pub fn black_pos(&self, b: usize) -> Point {
        let n = self.primal.len();
        if b < n {
            self.primal.pos(b)
        } else {
            self.centroids[b - n]
        }
    }

    /// Whether the primal edge of `w` lies on the boundary cycle.
    pub fn is_boundary_white(&self, w: usize) -> bool {
        let (u, v) = self.white_edge[w];
        match (self.boundary_index[u], self.boundary_index[v]) {
            (Some(i), Some(j)) => {
                let l = self.boundary.len();
                (i + 1) % l == j || (j + 1) % l == i
            }
            _ => false,
        }
    }

    /// Two-colouring of the combined graph by breadth-first parity; `true` when
    /// it is proper and every black lands on one side and every white on the other.
    pub fn check_bipartite(&self) -> bool {
        let nb = self.black_count();
        let total = nb + self.white_count();
        let mut adj = vec![Vec::new(); total];
        for (w, list) in self.white_adj.iter().enumerate() {
            for &b in list {
                adj[nb + w].push(b);
                adj[b].push(nb + w);
            }
        }
        let mut colour = vec![u8::MAX; total];
        for s in 0..total {
            if colour[s] != u8::MAX {
                continue;
            }
            colour[s] = u8::from(s >= nb);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if colour[v] == u8::MAX {
                        colour[v] = 1 - colour[u];
                        queue.push_back(v);
                    } else if colour[v] == colour[u] {
                        return false;
                    }
                }
            }
        }
        (0..total).all(|v| colour[v] == u8::from(v >= nb))
    }

    /// Degree structure and Euler consistency: every white has both primal
    /// endpoints, four neighbours off the boundary cycle and three on it, and
    /// `|faces| = |E| − |V| + 1`.
    pub fn check_structure(&self) -> Result<(), String> {
        let n = self.primal.len();
        if self.white_count() != self.primal.edge_count() {
            return Err(format!("{} whites for {} primal edges", self.white_count(), self.primal.edge_count()));
        }
        if self.faces.len() + n != self.primal.edge_count() + 1 {
            return Err(format!("Euler: V = {n}, E = {}, F = {}", self.primal.edge_count(), self.faces.len()));
        }
        for w in 0..self.white_count() {
            let nb = &self.white_adj[w];
            let (u, v) = self.white_edge[w];
            if nb[0] != u || nb[1] != v || nb[2..].iter().any(|&b| b < n) {
                return Err(format!("white {w}: bad neighbours {nb:?}"));
            }
            let want = if self.is_boundary_white(w) { 3 } else { 4 };
            if nb.len() != want {
                return Err(format!("white {w}: degree {} (expected {want})", nb.len()));
            }
        }
        Ok(())
    }
}
