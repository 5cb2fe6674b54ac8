use crate::geom::{Point, Rect};
use crate::graph::EmbeddedGraph;

use super::EnvError;

/// Index range of `mesh·ℤ` inside `[lo, hi]`, tolerant to rounding.
pub(crate) fn lattice_range(lo: f64, hi: f64, mesh: f64) -> (i64, i64) {
    let eps = 1e-9;
    ((lo / mesh - eps).ceil() as i64, (hi / mesh + eps).floor() as i64)
}

/// Points of `mesh·ℤ²` inside `bbox` with nearest-neighbour edges.
/// Vertex ids run along x first, then y.
pub fn generate_square_lattice(bbox: Rect, mesh: f64) -> Result<EmbeddedGraph, EnvError> {
    if !(mesh > 0.0) || 2.0 * bbox.half_w < mesh * (1.0 - 1e-9) || 2.0 * bbox.half_h < mesh * (1.0 - 1e-9) {
        return Err(EnvError::InvalidParams(format!(
            "box {}x{} smaller than mesh {mesh}",
            2.0 * bbox.half_w,
            2.0 * bbox.half_h
        )));
    }
    let (i0, i1) = lattice_range(bbox.x_min(), bbox.x_max(), mesh);
    let (j0, j1) = lattice_range(bbox.y_min(), bbox.y_max(), mesh);
    let (nx, ny) = ((i1 - i0 + 1).max(0) as usize, (j1 - j0 + 1).max(0) as usize);
    let mut pos = Vec::with_capacity(nx * ny);
    for j in j0..=j1 {
        for i in i0..=i1 {
            pos.push(Point::new(i as f64 * mesh, j as f64 * mesh));
        }
    }
    let mut edges = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let v = j * nx + i;
            if i + 1 < nx {
                edges.push((v, v + 1));
            }
            if j + 1 < ny {
                edges.push((v, v + nx));
            }
        }
    }
    Ok(EmbeddedGraph::from_edges(pos, &edges).expect("lattice edges are simple"))
}
