//! The embedded planar graph shared by every module.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Point, Rect};

pub type VertexId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("edge {index}: endpoint {vertex} out of range (graph has {n} vertices)")]
    EndpointOutOfRange { index: usize, vertex: usize, n: usize },
    #[error("edge {index}: self-loop at vertex {vertex}")]
    SelfLoop { index: usize, vertex: usize },
    #[error("edge {index}: duplicate edge ({u}, {v})")]
    DuplicateEdge { index: usize, u: usize, v: usize },
    #[error("vertex {vertex}: non-finite coordinate")]
    NonFinite { vertex: usize },
    #[error("graph is disconnected: vertex {vertex} unreachable from vertex 0")]
    Disconnected { vertex: usize },
    #[error("adjacency asymmetric at ({u}, {v})")]
    Asymmetric { u: usize, v: usize },
}

/// Undirected simple graph with straight-line embedding; all edges have unit weight.
///
/// Vertex ids are the indices `0..n`. Neighbor lists are sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedGraph {
    pos: Vec<Point>,
    adj: Vec<Vec<VertexId>>,
}

impl EmbeddedGraph {
    /// Build from positions and an edge list. Rejects self-loops and duplicate edges.
    pub fn from_edges(pos: Vec<Point>, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let n = pos.len();
        if let Some(vertex) = pos.iter().position(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(GraphError::NonFinite { vertex });
        }
        let mut adj = vec![Vec::new(); n];
        for (index, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::EndpointOutOfRange { index, vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { index, vertex: u });
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let v = w[0];
                let index = edges.iter().rposition(|&(a, b)| (a == u && b == v) || (a == v && b == u)).unwrap_or(0);
                return Err(GraphError::DuplicateEdge { index, u: u.min(v), v: u.max(v) });
            }
        }
        Ok(EmbeddedGraph { pos, adj })
    }

    /// Build from adjacency lists assumed symmetric; validated.
    pub fn from_adjacency(pos: Vec<Point>, mut adj: Vec<Vec<VertexId>>) -> Result<Self, GraphError> {
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        let g = EmbeddedGraph { pos, adj };
        g.check_symmetry()?;
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    pub fn pos(&self, v: VertexId) -> Point {
        self.pos[v]
    }

    pub fn positions(&self) -> &[Point] {
        &self.pos
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }

    pub fn adjacency(&self) -> &[Vec<VertexId>] {
        &self.adj
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, l)| l.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    fn check_symmetry(&self) -> Result<(), GraphError> {
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if v >= self.len() {
                    return Err(GraphError::EndpointOutOfRange { index: u, vertex: v, n: self.len() });
                }
                if v == u {
                    return Err(GraphError::SelfLoop { index: u, vertex: u });
                }
                if !self.has_edge(v, u) {
                    return Err(GraphError::Asymmetric { u, v });
                }
            }
        }
        Ok(())
    }

    /// Symmetry, simplicity and connectivity.
    pub fn check_invariants(&self) -> Result<(), GraphError> {
        self.check_symmetry()?;
        for (u, list) in self.adj.iter().enumerate() {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                let v = list.windows(2).find(|w| w[0] >= w[1]).map(|w| w[0]).unwrap_or(u);
                return Err(GraphError::DuplicateEdge { index: u, u, v });
            }
        }
        let comp = self.components();
        if let Some(vertex) = comp.iter().position(|&c| c != 0) {
            return Err(GraphError::Disconnected { vertex });
        }
        Ok(())
    }

    /// Component label per vertex, labels assigned in order of smallest member.
    pub fn components(&self) -> Vec<usize> {
        let n = self.len();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Subgraph induced by `keep`, relabelled in increasing order of old id.
    /// Returns the graph and the old id of each new vertex.
    pub fn induced(&self, keep: &[bool]) -> (EmbeddedGraph, Vec<VertexId>) {
        let mut new_id = vec![usize::MAX; self.len()];
        let mut old = Vec::new();
        for v in 0..self.len() {
            if keep[v] {
                new_id[v] = old.len();
                old.push(v);
            }
        }
        let pos = old.iter().map(|&v| self.pos[v]).collect();
        let adj = old.iter().map(|&v| self.adj[v].iter().filter(|&&w| keep[w]).map(|&w| new_id[w]).collect()).collect();
        (EmbeddedGraph { pos, adj }, old)
    }

    /// Largest connected component; ties go to the component with the smallest vertex id.
    pub fn largest_component(&self) -> (EmbeddedGraph, Vec<VertexId>) {
        let label = self.components();
        let k = label.iter().copied().max().map_or(0, |m| m + 1);
        let mut size = vec![0usize; k];
        for &l in &label {
            size[l] += 1;
        }
        let best = (0..k).max_by(|&a, &b| size[a].cmp(&size[b]).then(b.cmp(&a))).unwrap_or(0);
        let keep: Vec<bool> = label.iter().map(|&l| l == best).collect();
        self.induced(&keep)
    }

    /// Vertex closest to `p`; ties broken by smallest x, then y, then id.
    pub fn closest_vertex(&self, p: Point) -> Option<VertexId> {
        (0..self.len()).min_by(|&a, &b| {
            let (pa, pb) = (self.pos[a], self.pos[b]);
            pa.dist(p).total_cmp(&pb.dist(p)).then(pa.x.total_cmp(&pb.x)).then(pa.y.total_cmp(&pb.y)).then(a.cmp(&b))
        })
    }

    pub fn vertices_in(&self, r: &Rect) -> Vec<VertexId> {
        (0..self.len()).filter(|&v| r.contains(self.pos[v])).collect()
    }

    /// Same graph with every position mapped through `f`.
    pub fn map_positions(&self, f: impl Fn(Point) -> Point) -> EmbeddedGraph {
        EmbeddedGraph { pos: self.pos.iter().map(|&p| f(p)).collect(), adj: self.adj.clone() }
    }

    /// Breadth-first distances from `src` (`u32::MAX` when unreachable).
    pub fn bfs(&self, src: VertexId) -> Vec<u32> {
        self.bfs_within(src, None)
    }

    /// Breadth-first distances restricted to vertices with `allowed[v]`.
    pub fn bfs_within(&self, src: VertexId, allowed: Option<&[bool]>) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == u32::MAX && allowed.is_none_or(|a| a[v]) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}
