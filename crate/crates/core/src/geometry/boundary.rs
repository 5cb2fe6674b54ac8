use serde::{Deserialize, Serialize};

use crate::graph::{EmbeddedGraph, VertexId};
use crate::planar::{outer_boundary_ccw, Face, Rotation};

use super::{mask_of, GeometryError};

/// Face counts of a connected induced subgraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerData {
    pub vertices: usize,
    pub edges: usize,
    /// Length of the outer face walk; edges with the outer face on both sides count twice.
    pub perimeter: usize,
    pub triangles: usize,
    /// `edges == 3·vertices − perimeter − 3`.
    pub identity_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub subset: Vec<VertexId>,
    pub size: usize,
    /// Sum of degrees over `A`, counting only edges inside the ambient set.
    pub vol_e: usize,
    /// Edges from `A` to `ambient \ A`.
    pub boundary_e: usize,
    /// Vertices of `A` with a neighbour outside `A` in the whole graph.
    pub boundary_v: usize,
    /// Vertices of `A` with a neighbour in `ambient \ A`.
    pub boundary_int: usize,
    pub ratio: Option<f64>,
    /// Every bounded face of the subgraph induced by `A` is a triangle.
    pub simply_connected: bool,
    /// Size after filling the finite holes of `A`.
    pub filled_size: usize,
    /// Face data of `A` (or of its filling when `A` has holes); `None` when the
    /// filled set still has a non-triangular bounded face.
    pub euler: Option<EulerData>,
    /// `ratio ≥ boundary_int / (7·size)`.
    pub seventh_bound: Option<bool>,
}

impl BoundaryReport {
    pub fn csv_header() -> &'static str {
        "size,vol_E,boundary_E,boundary_V,boundary_int,ratio"
    }

    pub fn csv_row(&self) -> String {
        let ratio = self.ratio.map_or_else(String::new, |r| format!("{r}"));
        format!("{},{},{},{},{},{}", self.size, self.vol_e, self.boundary_e, self.boundary_v, self.boundary_int, ratio)
    }
}

/// Precomputed context for many boundary reports against one ambient set.
pub struct SubsetView<'a> {
    g: &'a EmbeddedGraph,
    ambient: Vec<bool>,
    on_outer: Vec<bool>,
    rotation: Rotation,
}

impl<'a> SubsetView<'a> {
    pub fn new(g: &'a EmbeddedGraph, ambient: &[VertexId]) -> Result<Self, GeometryError> {
        let ambient = mask_of(g.len(), ambient)?;
        let mut on_outer = vec![false; g.len()];
        if let Some(walk) = outer_boundary_ccw(g) {
            for v in walk {
                on_outer[v] = true;
            }
        } else if g.len() == 1 {
            on_outer[0] = true;
        }
        Ok(SubsetView { g, ambient, on_outer, rotation: Rotation::new(g) })
    }

    pub fn graph(&self) -> &EmbeddedGraph {
        self.g
    }

    pub fn ambient_mask(&self) -> &[bool] {
        &self.ambient
    }

    /// Boundary cardinalities only, no face computations.
    pub fn counts(&self, a: &[VertexId], in_a: &[bool]) -> (usize, usize, usize, usize) {
        let (mut vol, mut be, mut bv, mut bint) = (0, 0, 0, 0);
        for &v in a {
            let mut outside = false;
            let mut interior = false;
            for &w in self.g.neighbors(v) {
                if self.ambient[w] {
                    vol += 1;
                    if !in_a[w] {
                        be += 1;
                        interior = true;
                    }
                }
                outside |= !in_a[w];
            }
            bv += usize::from(outside);
            bint += usize::from(interior);
        }
        (vol, be, bv, bint)
    }

    pub fn report(&self, a: &[VertexId]) -> Result<BoundaryReport, GeometryError> {
        if a.is_empty() {
            return Err(GeometryError::EmptySet);
        }
        let in_a = mask_of(self.g.len(), a)?;
        if let Some(&v) = a.iter().find(|&&v| !self.ambient[v]) {
            return Err(GeometryError::NotInAmbient(v));
        }
        let mut subset = a.to_vec();
        subset.sort_unstable();
        subset.dedup();
        if !connected_within(self.g, &in_a, &subset) {
            return Err(GeometryError::Disconnected);
        }
        let (vol_e, boundary_e, boundary_v, boundary_int) = self.counts(&subset, &in_a);
        let size = subset.len();
        let ratio = (vol_e > 0).then(|| boundary_e as f64 / vol_e as f64);
        let seventh_bound = ratio.map(|r| r * 7.0 * size as f64 >= boundary_int as f64);

        let (data, simply_connected) = self.face_data(&in_a, &subset);
        let (filled_size, euler) = if simply_connected {
            (size, Some(data))
        } else {
            let filled = self.fill(&in_a);
            let fverts: Vec<VertexId> = (0..filled.len()).filter(|&v| filled[v]).collect();
            let (fdata, ok) = self.face_data(&filled, &fverts);
            (fverts.len(), ok.then_some(fdata))
        };
        Ok(BoundaryReport {
            subset,
            size,
            vol_e,
            boundary_e,
            boundary_v,
            boundary_int,
            ratio,
            simply_connected,
            filled_size,
            euler,
            seventh_bound,
        })
    }

    /// `A` plus every component of `g \ A` that avoids the outer face of `g`.
    pub fn fill(&self, in_a: &[bool]) -> Vec<bool> {
        let n = self.g.len();
        let mut filled = in_a.to_vec();
        let mut seen = in_a.to_vec();
        let mut stack = Vec::new();
        let mut comp = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            stack.push(s);
            comp.clear();
            let mut escapes = false;
            while let Some(v) = stack.pop() {
                comp.push(v);
                escapes |= self.on_outer[v];
                for &w in self.g.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            if !escapes {
                for &v in &comp {
                    filled[v] = true;
                }
            }
        }
        filled
    }
}

impl SubsetView<'_> {
    /// Face data of the connected subgraph induced by `mask` (vertices `verts`)
    /// and whether all its bounded faces are triangles.
    fn face_data(&self, mask: &[bool], verts: &[VertexId]) -> (EulerData, bool) {
        let vertices = verts.len();
        let edges = verts.iter().map(|&v| self.g.neighbors(v).iter().filter(|&&w| mask[w]).count()).sum::<usize>() / 2;
        let faces = self.rotation.faces_within(self.g, mask, verts);
        let (perimeter, triangles, all_triangles) = match outer_index(&faces) {
            Some(o) => {
                let t = faces.iter().enumerate().filter(|&(i, f)| i != o && f.len() == 3).count();
                (faces[o].len(), t, t + 1 == faces.len())
            }
            None => (0, 0, true),
        };
        let identity_holds = edges as i64 == 3 * vertices as i64 - perimeter as i64 - 3;
        (EulerData { vertices, edges, perimeter, triangles, identity_holds }, all_triangles)
    }
}

fn outer_index(faces: &[Face]) -> Option<usize> {
    faces.iter().enumerate().min_by(|a, b| a.1.signed_area.total_cmp(&b.1.signed_area)).map(|(i, _)| i)
}

fn connected_within(g: &EmbeddedGraph, mask: &[bool], verts: &[VertexId]) -> bool {
    let Some(&start) = verts.first() else {
        return false;
    };
    // verts is sorted, so a local bitmap replaces a hash set
    let mut seen = vec![false; verts.len()];
    let mut count = 1;
    seen[0] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in g.neighbors(v) {
            if mask[w] {
                let i = verts.binary_search(&w).expect("mask matches verts");
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

/// Boundary cardinalities of `a` inside `ambient`, plus Euler data.
pub fn boundary_report(
    g: &EmbeddedGraph,
    ambient: &[VertexId],
    a: &[VertexId],
) -> Result<BoundaryReport, GeometryError> {
    SubsetView::new(g, ambient)?.report(a)
}
