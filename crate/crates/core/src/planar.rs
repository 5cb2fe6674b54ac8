//! Rotation systems and face walks of straight-line plane graphs.

use crate::graph::{EmbeddedGraph, VertexId};

/// A face as the cyclic sequence of vertices met walking its boundary with the
/// face on the left. Bounded faces have positive signed area; the outer face of
/// each component has non-positive area.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub walk: Vec<VertexId>,
    pub signed_area: f64,
}

impl Face {
    pub fn len(&self) -> usize {
        self.walk.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walk.is_empty()
    }

    pub fn centroid(&self, g: &EmbeddedGraph) -> crate::geom::Point {
        polygon_centroid(self.walk.iter().map(|&v| g.pos(v)))
    }
}

/// Area centroid of a simple polygon (vertex average when degenerate).
pub fn polygon_centroid(pts: impl Iterator<Item = crate::geom::Point>) -> crate::geom::Point {
    let pts: Vec<_> = pts.collect();
    let n = pts.len();
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (p, q) = (pts[i], pts[(i + 1) % n]);
        let c = p.cross(q);
        a += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    if a.abs() < 1e-300 {
        let s = pts.iter().fold(crate::geom::Point::ORIGIN, |acc, &p| acc.add(p));
        return s.scale(1.0 / n.max(1) as f64);
    }
    crate::geom::Point::new(cx / (3.0 * a), cy / (3.0 * a))
}

/// Neighbors of every vertex sorted counterclockwise by angle, with twin lookup.
pub struct Rotation {
    order: Vec<Vec<VertexId>>,
    /// `twin[u][k]` = position of `u` in `order[order[u][k]]`.
    twin: Vec<Vec<usize>>,
}

impl Rotation {
    pub fn new(g: &EmbeddedGraph) -> Self {
        let n = g.len();
        let mut order: Vec<Vec<VertexId>> = Vec::with_capacity(n);
        for u in 0..n {
            let p = g.pos(u);
            let mut nb: Vec<(f64, VertexId)> = g
                .neighbors(u)
                .iter()
                .map(|&v| {
                    let q = g.pos(v);
                    ((q.y - p.y).atan2(q.x - p.x), v)
                })
                .collect();
            nb.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            order.push(nb.into_iter().map(|(_, v)| v).collect());
        }
        // position of each neighbor id inside order[v]
        let mut rank: Vec<Vec<(VertexId, usize)>> =
            order.iter().map(|l| l.iter().enumerate().map(|(k, &w)| (w, k)).collect()).collect();
        for r in rank.iter_mut() {
            r.sort_unstable();
        }
        let lookup = |v: VertexId, w: VertexId| -> usize {
            let r = &rank[v];
            r[r.binary_search_by(|e| e.0.cmp(&w)).expect("adjacency is symmetric")].1
        };
        let twin = (0..n).map(|u| order[u].iter().map(|&v| lookup(v, u)).collect()).collect();
        Rotation { order, twin }
    }

    /// Faces of the subgraph induced by `keep`, traced on this rotation system
    /// without building the subgraph. `verts` must list the kept vertices in
    /// increasing order.
    pub fn faces_within(&self, g: &EmbeddedGraph, keep: &[bool], verts: &[VertexId]) -> Vec<Face> {
        debug_assert!(verts.windows(2).all(|w| w[0] < w[1]));
        let mut offset = Vec::with_capacity(verts.len() + 1);
        offset.push(0);
        for &v in verts {
            offset.push(offset.last().unwrap() + self.order[v].len());
        }
        let slot = |u: VertexId, k: usize| offset[verts.binary_search(&u).expect("vertex listed")] + k;
        let mut seen = vec![false; *offset.last().unwrap()];
        let mut faces = Vec::new();
        for &u0 in verts {
            for k0 in 0..self.order[u0].len() {
                if !keep[self.order[u0][k0]] || seen[slot(u0, k0)] {
                    continue;
                }
                let mut walk = Vec::new();
                let (mut u, mut k) = (u0, k0);
                loop {
                    seen[slot(u, k)] = true;
                    walk.push(u);
                    let v = self.order[u][k];
                    let d = self.order[v].len();
                    let mut kv = self.twin[u][k];
                    loop {
                        kv = (kv + d - 1) % d;
                        if keep[self.order[v][kv]] {
                            break;
                        }
                    }
                    u = v;
                    k = kv;
                    if u == u0 && k == k0 {
                        break;
                    }
                }
                let signed_area = signed_area(g, &walk);
                faces.push(Face { walk, signed_area });
            }
        }
        faces
    }

    pub fn ccw_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.order[v]
    }

    /// Half-edge following `(u -> order[u][k])` on the face to its left.
    /// Returns `(v, position of next target in order[v])`.
    fn next(&self, u: VertexId, k: usize) -> (VertexId, usize) {
        let v = self.order[u][k];
        let back = self.twin[u][k];
        let d = self.order[v].len();
        (v, (back + d - 1) % d)
    }

    /// All faces of the graph (one outer face per connected component with edges).
    pub fn faces(&self, g: &EmbeddedGraph) -> Vec<Face> {
        let mut seen: Vec<Vec<bool>> = self.order.iter().map(|l| vec![false; l.len()]).collect();
        let mut faces = Vec::new();
        for u0 in 0..self.order.len() {
            for k0 in 0..self.order[u0].len() {
                if seen[u0][k0] {
                    continue;
                }
                let mut walk = Vec::new();
                let (mut u, mut k) = (u0, k0);
                loop {
                    seen[u][k] = true;
                    walk.push(u);
                    let (v, kv) = self.next(u, k);
                    u = v;
                    k = kv;
                    if u == u0 && k == k0 {
                        break;
                    }
                }
                let signed_area = signed_area(g, &walk);
                faces.push(Face { walk, signed_area });
            }
        }
        faces
    }
}

pub fn signed_area(g: &EmbeddedGraph, walk: &[VertexId]) -> f64 {
    let n = walk.len();
    0.5 * (0..n).map(|i| g.pos(walk[i]).cross(g.pos(walk[(i + 1) % n]))).sum::<f64>()
}

/// Faces split into (bounded faces, outer face). Requires a connected graph with an edge.
pub fn faces_with_outer(g: &EmbeddedGraph) -> Option<(Vec<Face>, Face)> {
    let mut faces = Rotation::new(g).faces(g);
    if faces.is_empty() {
        return None;
    }
    let outer_idx =
        faces.iter().enumerate().min_by(|a, b| a.1.signed_area.total_cmp(&b.1.signed_area)).map(|(i, _)| i)?;
    let outer = faces.swap_remove(outer_idx);
    // keep a deterministic order of the bounded faces
    faces.sort_by(|a, b| a.walk.iter().min().cmp(&b.walk.iter().min()).then(a.walk.cmp(&b.walk)));
    Some((faces, outer))
}

/// Counterclockwise boundary walk of the outer face (the walk is traced clockwise
/// with the face on the left; reversing gives the counterclockwise order).
pub fn outer_boundary_ccw(g: &EmbeddedGraph) -> Option<Vec<VertexId>> {
    let (_, outer) = faces_with_outer(g)?;
    let mut w = outer.walk;
    w.reverse();
    Some(w)
}

/// Bounded triangular faces of `g`, vertex triples sorted.
pub fn triangles(g: &EmbeddedGraph) -> Vec<[VertexId; 3]> {
    let Some((bounded, _)) = faces_with_outer(g) else {
        return Vec::new();
    };
    let mut out: Vec<[VertexId; 3]> = bounded
        .iter()
        .filter(|f| f.len() == 3)
        .map(|f| {
            let mut t = [f.walk[0], f.walk[1], f.walk[2]];
            t.sort_unstable();
            t
        })
        .collect();
    out.sort_unstable();
    out
}
