use serde::{Deserialize, Serialize};

use crate::geom::Rect;
use crate::graph::VertexId;

use super::wired::{Network, WiredGraph};

pub(crate) const NONE: u32 = u32::MAX;

/// One loop-erased branch: `path[0]` is the source, the last vertex is where
/// it joined the tree or the boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub source: VertexId,
    pub path: Vec<VertexId>,
}

/// A (partial) wired spanning tree stored as parent pointers toward the root.
/// Boundary vertices never get a parent; an interior vertex whose parent is a
/// boundary vertex uses that edge to the root.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    parent: Vec<u32>,
    size: usize,
    branches: Vec<Branch>,
}

impl SpanningTree {
    pub fn empty(n: usize) -> Self {
        SpanningTree { parent: vec![NONE; n], size: 0, branches: Vec::new() }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.parent[v] != NONE
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        (self.parent[v] != NONE).then_some(self.parent[v] as usize)
    }

    /// Interior vertices currently in the tree.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Tree edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out: Vec<_> =
            (0..self.parent.len()).filter_map(|v| self.parent(v).map(|p| (v.min(p), v.max(p)))).collect();
        out.sort_unstable();
        out
    }

    /// Edges with both endpoints inside `bx`, sorted.
    pub fn edges_in(&self, net: &Network, bx: &Rect) -> Vec<(VertexId, VertexId)> {
        let mut out: Vec<_> = net
            .vertices_in(bx)
            .into_iter()
            .filter_map(|v| self.parent(v).filter(|&p| bx.contains(net.pos(p))).map(|p| (v.min(p), v.max(p))))
            .collect();
        out.sort_unstable();
        out
    }

    /// Attach a loop-erased path; every vertex but the last becomes a tree vertex.
    pub(crate) fn graft(&mut self, path: Vec<VertexId>) {
        for w in path.windows(2) {
            debug_assert_eq!(self.parent[w[0]], NONE);
            self.parent[w[0]] = w[1] as u32;
            self.size += 1;
        }
        if path.len() > 1 {
            self.branches.push(Branch { source: path[0], path });
        }
    }

    /// Checks that this is a spanning tree of the wired graph: every interior
    /// vertex has a parent along a graph edge, no boundary vertex has one, and
    /// parent chains reach the boundary without cycles.
    pub fn check_spanning(&self, wg: &WiredGraph) -> Result<(), String> {
        let net = wg.network();
        let n = wg.len();
        if self.parent.len() != n {
            return Err("tree and graph sizes differ".into());
        }
        for v in 0..n {
            match (wg.is_interior(v), self.parent(v)) {
                (true, None) => return Err(format!("interior vertex {v} not spanned")),
                (false, Some(_)) => return Err(format!("boundary vertex {v} has a parent")),
                (true, Some(p)) if !net.neighbors(v).contains(&(p as u32)) => {
                    return Err(format!("parent edge ({v}, {p}) not in graph"))
                }
                _ => {}
            }
        }
        // depth marking: 0 unknown, 1 on stack, 2 reaches root
        let mut mark = vec![0u8; n];
        for s in 0..n {
            let mut stack = Vec::new();
            let mut v = s;
            while wg.is_interior(v) && mark[v] == 0 {
                mark[v] = 1;
                stack.push(v);
                v = self.parent[v] as usize;
            }
            if wg.is_interior(v) && mark[v] == 1 {
                return Err(format!("cycle through vertex {v}"));
            }
            for u in stack {
                mark[u] = 2;
            }
        }
        if self.size != wg.interior_ids().len() {
            return Err(format!("{} edges for {} interior vertices", self.size, wg.interior_ids().len()));
        }
        Ok(())
    }
}

/// True iff the two trees have the same edges among those with both
/// endpoints in `bx` (exact set equality).
pub fn verify_agreement(net: &Network, t1: &SpanningTree, t2: &SpanningTree, bx: &Rect) -> bool {
    t1.edges_in(net, bx) == t2.edges_in(net, bx)
}
