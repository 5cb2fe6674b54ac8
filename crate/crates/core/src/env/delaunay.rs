use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use spade::{DelaunayTriangulation, Point2, Triangulation};

use crate::geom::{Point, Rect};
use crate::graph::EmbeddedGraph;
use crate::rng::rng_from_seed;

use super::EnvError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonParams {
    /// Points per unit area.
    pub intensity: f64,
    /// Inner box the returned graph is clipped to.
    pub window: Rect,
    /// Extra margin sampled around the window.
    pub padding: f64,
}

impl PoissonParams {
    pub fn new(intensity: f64, window: Rect) -> Self {
        PoissonParams { intensity, window, padding: 3.0 / intensity.sqrt() }
    }

    pub fn sampling_box(&self) -> Rect {
        self.window.expand(self.padding)
    }
}

/// Poisson point sample in the padded box.
pub fn sample_poisson_points(params: &PoissonParams, seed: u64) -> Result<Vec<Point>, EnvError> {
    if !(params.intensity > 0.0 && params.intensity.is_finite()) {
        return Err(EnvError::InvalidParams(format!("intensity {} must be positive", params.intensity)));
    }
    if !(params.padding >= 0.0) {
        return Err(EnvError::InvalidParams(format!("padding {} must be non-negative", params.padding)));
    }
    let outer = params.sampling_box();
    let mean = params.intensity * outer.area();
    let mut rng = rng_from_seed(seed);
    let count = Poisson::new(mean)
        .map_err(|e| EnvError::InvalidParams(format!("poisson mean {mean}: {e}")))?
        .sample(&mut rng) as usize;
    Ok((0..count)
        .map(|_| {
            let x = outer.x_min() + rng.random::<f64>() * 2.0 * outer.half_w;
            let y = outer.y_min() + rng.random::<f64>() * 2.0 * outer.half_h;
            Point::new(x, y)
        })
        .collect())
}

/// Delaunay triangulation of an explicit point set. Duplicate points are
/// merged into their first occurrence.
pub fn delaunay_of_points(points: &[Point]) -> Result<EmbeddedGraph, EnvError> {
    let (pos, edges) = triangulate(points)?;
    EmbeddedGraph::from_edges(pos, &edges).map_err(|e| EnvError::InvalidParams(e.to_string()))
}

type Triangulated = (Vec<Point>, Vec<(usize, usize)>);

fn triangulate(points: &[Point]) -> Result<Triangulated, EnvError> {
    let mut tri: DelaunayTriangulation<Point2<f64>> = DelaunayTriangulation::new();
    let mut pos = Vec::with_capacity(points.len());
    for p in points {
        let h = tri
            .insert(Point2::new(p.x, p.y))
            .map_err(|e| EnvError::InvalidParams(format!("point ({}, {}): {e:?}", p.x, p.y)))?;
        if h.index() == pos.len() {
            pos.push(*p);
        }
    }
    if pos.len() < 3 {
        return Err(EnvError::DegeneratePointSet { count: pos.len() });
    }
    let mut edges: Vec<(usize, usize)> = tri
        .undirected_edges()
        .map(|e| {
            let [a, b] = e.vertices();
            let (a, b) = (a.fix().index(), b.fix().index());
            (a.min(b), a.max(b))
        })
        .collect();
    edges.sort_unstable();
    Ok((pos, edges))
}

/// Poisson–Delaunay graph: triangulate the padded sample, keep edges with both
/// endpoints in the window, return the largest component.
pub fn generate_poisson_delaunay(params: &PoissonParams, seed: u64) -> Result<EmbeddedGraph, EnvError> {
    let points = sample_poisson_points(params, seed)?;
    if points.len() < 3 {
        return Err(EnvError::DegeneratePointSet { count: points.len() });
    }
    let (pos, edges) = triangulate(&points)?;
    let full = EmbeddedGraph::from_edges(pos, &edges).map_err(|e| EnvError::InvalidParams(e.to_string()))?;
    let keep: Vec<bool> = full.positions().iter().map(|&p| params.window.contains(p)).collect();
    let (inner, _) = full.induced(&keep);
    let (g, _) = inner.largest_component();
    if g.len() < 3 {
        return Err(EnvError::DegeneratePointSet { count: g.len() });
    }
    Ok(g)
}
