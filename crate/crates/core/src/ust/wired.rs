use std::collections::VecDeque;
use std::sync::Arc;

use crate::geom::{Point, Rect};
use crate::graph::{EmbeddedGraph, VertexId};

use super::UstError;

/// Compressed adjacency of the ambient graph plus a bucket grid for box queries.
/// Shared between every domain cut out of the same graph.
#[derive(Debug)]
pub struct Network {
    pub(crate) pos: Vec<Point>,
    pub(crate) offsets: Vec<usize>,
    pub(crate) targets: Vec<u32>,
    grid: BucketGrid,
}

#[derive(Debug)]
struct BucketGrid {
    x0: f64,
    y0: f64,
    h: f64,
    nx: usize,
    ny: usize,
    start: Vec<u32>,
    items: Vec<u32>,
}

impl BucketGrid {
    fn new(pos: &[Point]) -> Self {
        let n = pos.len().max(1);
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in pos {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
        if pos.is_empty() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let (w, hgt) = ((x1 - x0).max(1e-9), (y1 - y0).max(1e-9));
        // about two points per bucket
        let h = (2.0 * w * hgt / n as f64).sqrt().max(1e-9);
        let nx = ((w / h).floor() as usize + 1).min(4 * n);
        let ny = ((hgt / h).floor() as usize + 1).min(4 * n);
        let h = h.max(w / nx as f64).max(hgt / ny as f64);
        let cell = |p: Point| -> usize {
            let i = (((p.x - x0) / h) as usize).min(nx - 1);
            let j = (((p.y - y0) / h) as usize).min(ny - 1);
            j * nx + i
        };
        let mut count = vec![0u32; nx * ny + 1];
        for p in pos {
            count[cell(*p) + 1] += 1;
        }
        for k in 1..count.len() {
            count[k] += count[k - 1];
        }
        let mut fill = count.clone();
        let mut items = vec![0u32; pos.len()];
        for (v, p) in pos.iter().enumerate() {
            let c = cell(*p);
            items[fill[c] as usize] = v as u32;
            fill[c] += 1;
        }
        BucketGrid { x0, y0, h, nx, ny, start: count, items }
    }

    fn query(&self, r: &Rect, pos: &[Point], out: &mut Vec<VertexId>) {
        let lo = |v: f64, o: f64, n: usize| (((v - o) / self.h).floor().max(0.0) as usize).min(n - 1);
        let (i0, i1) = (lo(r.x_min(), self.x0, self.nx), lo(r.x_max(), self.x0, self.nx));
        let (j0, j1) = (lo(r.y_min(), self.y0, self.ny), lo(r.y_max(), self.y0, self.ny));
        if r.x_max() < self.x0 || r.y_max() < self.y0 {
            return;
        }
        for j in j0..=j1 {
            for i in i0..=i1 {
                let c = j * self.nx + i;
                for &v in &self.items[self.start[c] as usize..self.start[c + 1] as usize] {
                    if r.contains(pos[v as usize]) {
                        out.push(v as usize);
                    }
                }
            }
        }
    }
}

impl Network {
    pub fn new(g: &EmbeddedGraph) -> Self {
        let mut offsets = Vec::with_capacity(g.len() + 1);
        let mut targets = Vec::with_capacity(2 * g.edge_count());
        offsets.push(0);
        for v in 0..g.len() {
            targets.extend(g.neighbors(v).iter().map(|&w| w as u32));
            offsets.push(targets.len());
        }
        Network { pos: g.positions().to_vec(), offsets, targets, grid: BucketGrid::new(g.positions()) }
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

    pub fn neighbors(&self, v: VertexId) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Vertices inside the closed rectangle, in increasing id order.
    pub fn vertices_in(&self, r: &Rect) -> Vec<VertexId> {
        let mut out = Vec::new();
        self.grid.query(r, &self.pos, &mut out);
        out.sort_unstable();
        out
    }

    /// Vertex closest to `p` among those in `Λ_reach(p)`; ties by id.
    pub fn nearest_within(&self, p: Point, reach: f64, keep: impl Fn(VertexId) -> bool) -> Option<VertexId> {
        self.vertices_in(&Rect::square(p, reach))
            .into_iter()
            .filter(|&v| keep(v))
            .min_by(|&a, &b| self.pos[a].dist(p).total_cmp(&self.pos[b].dist(p)).then(a.cmp(&b)))
    }
}

/// A domain of the ambient graph with wired boundary: the walk is absorbed as
/// soon as it steps onto a vertex outside `interior`. All such vertices act as
/// one root, but each edge to the root keeps its original endpoint so parallel
/// root edges stay distinct.
#[derive(Debug, Clone)]
pub struct WiredGraph {
    net: Arc<Network>,
    interior: Vec<bool>,
    interior_ids: Vec<VertexId>,
}

impl WiredGraph {
    pub fn new(g: &EmbeddedGraph, interior: Vec<bool>) -> Result<Self, UstError> {
        Self::on_network(Arc::new(Network::new(g)), interior)
    }

    /// Interior = vertices strictly inside `domain`.
    pub fn from_rect(g: &EmbeddedGraph, domain: &Rect) -> Result<Self, UstError> {
        let interior = g.positions().iter().map(|&p| domain.contains_open(p)).collect();
        Self::new(g, interior)
    }

    /// Another domain on the same ambient graph.
    pub fn with_interior(&self, interior: Vec<bool>) -> Result<Self, UstError> {
        Self::on_network(self.net.clone(), interior)
    }

    pub fn with_rect(&self, domain: &Rect) -> Result<Self, UstError> {
        let interior = self.net.pos.iter().map(|&p| domain.contains_open(p)).collect();
        self.with_interior(interior)
    }

    pub fn on_network(net: Arc<Network>, interior: Vec<bool>) -> Result<Self, UstError> {
        let n = net.len();
        if interior.len() != n {
            return Err(UstError::Domain(format!("mask has {} entries for {} vertices", interior.len(), n)));
        }
        let interior_ids: Vec<VertexId> = (0..n).filter(|&v| interior[v]).collect();
        if !interior_ids.is_empty() {
            // every interior vertex must reach the root
            let mut seen = vec![false; n];
            let mut queue = VecDeque::new();
            for v in (0..n).filter(|&v| !interior[v]) {
                seen[v] = true;
                queue.push_back(v);
            }
            if queue.is_empty() {
                return Err(UstError::NoRoot);
            }
            while let Some(u) = queue.pop_front() {
                for &w in net.neighbors(u) {
                    let w = w as usize;
                    if !seen[w] && interior[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            if let Some(&v) = interior_ids.iter().find(|&&v| !seen[v]) {
                return Err(UstError::Unreachable { vertex: v });
            }
        }
        Ok(WiredGraph { net, interior, interior_ids })
    }

    pub fn network(&self) -> &Arc<Network> {
        &self.net
    }

    pub fn len(&self) -> usize {
        self.net.len()
    }

    pub fn is_empty(&self) -> bool {
        self.net.is_empty()
    }

    pub fn is_interior(&self, v: VertexId) -> bool {
        self.interior[v]
    }

    pub fn interior(&self) -> &[bool] {
        &self.interior
    }

    pub fn interior_ids(&self) -> &[VertexId] {
        &self.interior_ids
    }

    pub fn same_network(&self, other: &WiredGraph) -> bool {
        Arc::ptr_eq(&self.net, &other.net)
    }

    /// Edges of the wired graph as `(u, v)` with `u < v`: interior-interior
    /// and interior-boundary; boundary-boundary edges collapse into the root.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for &u in &self.interior_ids {
            for &w in self.net.neighbors(u) {
                let w = w as usize;
                if !self.interior[w] || w > u {
                    out.push((u.min(w), u.max(w)));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::generate_square_lattice;

    #[test]
    fn box_query_matches_scan() {
        let g = generate_square_lattice(Rect::square(Point::ORIGIN, 2.0), 0.25).unwrap();
        let net = Network::new(&g);
        for r in [
            Rect::square(Point::new(0.3, -0.2), 0.6),
            Rect::new(Point::new(1.9, 1.9), 0.2, 3.0),
            Rect::square(Point::new(9.0, 9.0), 1.0),
        ] {
            assert_eq!(net.vertices_in(&r), g.vertices_in(&r));
        }
    }

    #[test]
    fn wired_edges_of_small_grid() {
        // 3x3 interior inside a 5x5 grid: 12 inner edges, 12 root edges
        let g = generate_square_lattice(Rect::square(Point::ORIGIN, 2.0), 1.0).unwrap();
        let wg = WiredGraph::from_rect(&g, &Rect::square(Point::ORIGIN, 2.0)).unwrap();
        assert_eq!(wg.interior_ids().len(), 9);
        assert_eq!(wg.edges().len(), 24);
    }

    #[test]
    fn isolated_interior_is_rejected() {
        let pos = vec![Point::ORIGIN, Point::new(1.0, 0.0), Point::new(5.0, 0.0)];
        let g = EmbeddedGraph::from_edges(pos, &[(0, 1)]).unwrap();
        assert!(matches!(WiredGraph::new(&g, vec![false, true, true]), Err(UstError::Unreachable { vertex: 2 })));
        assert!(matches!(WiredGraph::new(&g, vec![true, true, true]), Err(UstError::NoRoot)));
    }
}
