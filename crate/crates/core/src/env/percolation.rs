use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geom::{Point, Rect};
use crate::graph::EmbeddedGraph;
use crate::rng::rng_from_seed;

use super::{generate_square_lattice, EnvError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationParams {
    /// Edge-open probability.
    pub p: f64,
    /// Half-width of the box `Λ_n ∩ ℤ²`.
    pub n: usize,
    /// Reject `p <= 1/2` when set.
    pub require_supercritical: bool,
}

impl PercolationParams {
    pub fn supercritical(p: f64, n: usize) -> Self {
        PercolationParams { p, n, require_supercritical: true }
    }
}

/// Largest open cluster of bond percolation in `Λ_n`, the finite-volume stand-in
/// for the infinite cluster.
#[derive(Debug, Clone)]
pub struct PercolationCluster {
    pub graph: EmbeddedGraph,
    /// Number of open edges in the whole box.
    pub open_edges: usize,
    /// Largest-cluster vertex count over `(2n+1)²`.
    pub largest_fraction: f64,
}

struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

pub fn generate_percolation_cluster(params: &PercolationParams, seed: u64) -> Result<PercolationCluster, EnvError> {
    let PercolationParams { p, n, require_supercritical } = *params;
    if !(p > 0.0 && p <= 1.0) {
        return Err(EnvError::InvalidParams(format!("p = {p} outside (0, 1]")));
    }
    if n < 2 {
        return Err(EnvError::InvalidParams(format!("box half-width n = {n} < 2")));
    }
    if require_supercritical && p <= 0.5 {
        return Err(EnvError::NotSupercritical { p });
    }
    let lattice = generate_square_lattice(Rect::square(Point::ORIGIN, n as f64), 1.0)?;
    let mut rng = rng_from_seed(seed);
    let mut open = Vec::new();
    let mut dsu = Dsu::new(lattice.len());
    // edges() is sorted, so the coin sequence is fixed by (n, seed)
    for (u, v) in lattice.edges() {
        if rng.random::<f64>() < p {
            open.push((u, v));
            dsu.union(u, v);
        }
    }
    let total = lattice.len();
    let mut best_root = dsu.find(0);
    for v in 1..total {
        let r = dsu.find(v);
        if dsu.size[r] > dsu.size[best_root] {
            best_root = r;
        }
    }
    let size = dsu.size[best_root];
    if size < 2 {
        return Err(EnvError::SubcriticalLike { size });
    }
    let keep: Vec<bool> = (0..total).map(|v| dsu.find(v) == best_root).collect();
    let full = EmbeddedGraph::from_edges(lattice.positions().to_vec(), &open).expect("subset of lattice edges");
    let (graph, _) = full.induced(&keep);
    Ok(PercolationCluster { graph, open_edges: open.len(), largest_fraction: size as f64 / total as f64 })
}
