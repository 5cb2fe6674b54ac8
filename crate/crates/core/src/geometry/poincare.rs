use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::graph::EmbeddedGraph;

use super::{BallIndex, GeometryError};

/// Dense eigen-solve size limit.
pub const DENSE_LIMIT: usize = 2000;

/// Named constants of the geometric goodness checklist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodnessParams {
    pub c_p: f64,
    pub c_v: f64,
    pub c_v_upper: f64,
    pub c_w: f64,
    pub c_euc: f64,
    pub c_i: f64,
    pub c0: f64,
    pub d: f64,
    pub n_b: f64,
}

impl GoodnessParams {
    pub fn validate(&self) -> Result<(), String> {
        let all = [self.c_p, self.c_v, self.c_v_upper, self.c_w, self.c_euc, self.c_i, self.c0, self.d, self.n_b];
        if all.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err("all goodness constants must be positive and finite".into());
        }
        if self.c_w < 1.0 {
            return Err(format!("C_W = {} must be at least 1", self.c_w));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    pub size: usize,
    /// Smallest nonzero eigenvalue of `L f = λ D f`.
    pub lambda2: f64,
    /// Optimal constant `1 / λ₂`.
    pub kappa: f64,
    /// `κ · I_H²` when an isoperimetric constant was supplied.
    pub kappa_iso2: Option<f64>,
    pub residual: f64,
}

fn laplacian(h: &EmbeddedGraph) -> (DMatrix<f64>, Vec<f64>) {
    let n = h.len();
    let mut l = DMatrix::zeros(n, n);
    let deg: Vec<f64> = (0..n).map(|v| h.degree(v) as f64).collect();
    for (u, v) in h.edges() {
        l[(u, v)] -= 1.0;
        l[(v, u)] -= 1.0;
    }
    for v in 0..n {
        l[(v, v)] = deg[v];
    }
    (l, deg)
}

/// Optimal weak-Poincaré constant on the subgraph induced by the ball.
pub fn poincare_constant(
    g: &EmbeddedGraph,
    ball: &BallIndex,
    iso: Option<f64>,
) -> Result<PoincareReport, GeometryError> {
    let (h, _) = g.induced(&ball.mask(g.len()));
    let n = h.len();
    if n > DENSE_LIMIT {
        return Err(GeometryError::TooLarge { size: n, limit: DENSE_LIMIT });
    }
    if n < 2 {
        return Err(GeometryError::EmptySet);
    }
    if !h.is_connected() {
        return Err(GeometryError::Disconnected);
    }
    let (l, deg) = laplacian(&h);
    let s: Vec<f64> = deg.iter().map(|d| 1.0 / d.sqrt()).collect();
    let m = DMatrix::from_fn(n, n, |i, j| l[(i, j)] * s[i] * s[j]);
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let k = order[1];
    let lambda2 = eig.eigenvalues[k];
    let vec = eig.eigenvectors.column(k);
    let residual = (&m * vec - vec * lambda2).amax();
    if !(residual < 1e-8) || !(lambda2 > 1e-12) {
        return Err(GeometryError::EigenFailure { residual });
    }
    let kappa = 1.0 / lambda2;
    Ok(PoincareReport { size: n, lambda2, kappa, kappa_iso2: iso.map(|i| kappa * i * i), residual })
}

/// Both sides of the Poincaré inequality for `f`, indexed like `ball.vertices()`:
/// `(Σ (f − f̄)² deg, Σ_edges |∇f|²)` with `f̄` the degree-weighted mean.
pub fn poincare_sides(g: &EmbeddedGraph, ball: &BallIndex, f: &[f64]) -> (f64, f64) {
    let (h, _) = g.induced(&ball.mask(g.len()));
    assert_eq!(f.len(), h.len(), "f must have one value per ball vertex");
    let deg: Vec<f64> = (0..h.len()).map(|v| h.degree(v) as f64).collect();
    let total: f64 = deg.iter().sum();
    let mean = if total > 0.0 { f.iter().zip(&deg).map(|(x, d)| x * d).sum::<f64>() / total } else { 0.0 };
    let var = f.iter().zip(&deg).map(|(x, d)| (x - mean).powi(2) * d).sum();
    let energy = h.edges().map(|(u, v)| (f[u] - f[v]).powi(2)).sum();
    (var, energy)
}
