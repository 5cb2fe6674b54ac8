use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::graph::EmbeddedGraph;

use super::WalkError;

/// Unknown count at or below which the dense direct solver is used.
pub const DIRECT_LIMIT: usize = 2000;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMethod {
    Trivial,
    DenseCholesky,
    ConjugateGradient { iterations: usize },
}

/// Probability `h(v)` that a walk from `v` hits the target before the kill set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingSolution {
    pub h: Vec<f64>,
    /// Largest `|h(v) − mean of neighbours|` over free vertices.
    pub residual: f64,
    pub method: SolveMethod,
}

impl HittingSolution {
    pub fn csv(&self) -> String {
        let mut out = String::from("vertex_id,h\n");
        for (v, h) in self.h.iter().enumerate() {
            out.push_str(&format!("{v},{h}\n"));
        }
        out
    }
}

/// Solves the discrete Dirichlet problem: `h = 1` on `target`, `0` on `kill`,
/// harmonic elsewhere.
pub fn solve_hitting_exact(g: &EmbeddedGraph, target: &[bool], kill: &[bool]) -> Result<HittingSolution, WalkError> {
    let n = g.len();
    if target.len() != n || kill.len() != n {
        return Err(WalkError::InvalidParams("mask length differs from vertex count".into()));
    }
    if let Some(v) = (0..n).find(|&v| target[v] && kill[v]) {
        return Err(WalkError::Overlap(v));
    }
    let fixed = |v: usize| target[v] || kill[v];

    // every free component must touch a fixed vertex
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| fixed(v)).collect();
    for &v in &stack {
        seen[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                if !fixed(w) {
                    stack.push(w);
                }
            }
        }
    }
    if let Some(v) = (0..n).find(|&v| !seen[v]) {
        let size = g
            .bfs_within(v, Some(&seen.iter().map(|s| !s).collect::<Vec<_>>()))
            .iter()
            .filter(|&&d| d != u32::MAX)
            .count();
        return Err(WalkError::Singular { vertex: v, size });
    }

    let free: Vec<usize> = (0..n).filter(|&v| !fixed(v)).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &v) in free.iter().enumerate() {
        index[v] = i;
    }
    let m = free.len();
    let mut h: Vec<f64> = (0..n).map(|v| if target[v] { 1.0 } else { 0.0 }).collect();
    let b: Vec<f64> = free.iter().map(|&v| g.neighbors(v).iter().filter(|&&w| target[w]).count() as f64).collect();

    let method = if m == 0 {
        SolveMethod::Trivial
    } else if m <= DIRECT_LIMIT {
        let mut a = DMatrix::<f64>::zeros(m, m);
        for (i, &v) in free.iter().enumerate() {
            a[(i, i)] = g.degree(v) as f64;
            for &w in g.neighbors(v) {
                if index[w] != usize::MAX {
                    a[(i, index[w])] -= 1.0;
                }
            }
        }
        let chol = a.cholesky().ok_or(WalkError::SolverFailure { residual: f64::INFINITY })?;
        let x = chol.solve(&DVector::from_vec(b));
        for (i, &v) in free.iter().enumerate() {
            h[v] = x[i];
        }
        SolveMethod::DenseCholesky
    } else {
        let x = conjugate_gradient(g, &free, &index, &b);
        for (i, &v) in free.iter().enumerate() {
            h[v] = x.0[i];
        }
        SolveMethod::ConjugateGradient { iterations: x.1 }
    };
    let residual = harmonic_residual(g, &h, &free);
    if !(residual < RESIDUAL_TOL) {
        return Err(WalkError::SolverFailure { residual });
    }
    for v in &free {
        h[*v] = h[*v].clamp(0.0, 1.0);
    }
    Ok(HittingSolution { h, residual, method })
}

fn harmonic_residual(g: &EmbeddedGraph, h: &[f64], free: &[usize]) -> f64 {
    free.iter()
        .map(|&v| {
            let nb = g.neighbors(v);
            let mean = nb.iter().map(|&w| h[w]).sum::<f64>() / nb.len() as f64;
            (h[v] - mean).abs()
        })
        .fold(0.0, f64::max)
}

/// Jacobi-preconditioned CG on the reduced Laplacian.
fn conjugate_gradient(g: &EmbeddedGraph, free: &[usize], index: &[usize], b: &[f64]) -> (Vec<f64>, usize) {
    let m = free.len();
    let diag: Vec<f64> = free.iter().map(|&v| g.degree(v) as f64).collect();
    let apply = |x: &[f64], out: &mut [f64]| {
        for (i, &v) in free.iter().enumerate() {
            let mut s = diag[i] * x[i];
            for &w in g.neighbors(v) {
                let j = index[w];
                if j != usize::MAX {
                    s -= x[j];
                }
            }
            out[i] = s;
        }
    };
    let mut x = vec![0.0; m];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; m];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let max_iter = 20 * m + 100;
    let mut it = 0;
    while it < max_iter {
        // r_i / deg_i is exactly the local harmonic defect
        let defect = r.iter().zip(&diag).map(|(r, d)| (r / d).abs()).fold(0.0, f64::max);
        if defect < 1e-12 {
            break;
        }
        apply(&p, &mut ap);
        let alpha = rz / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..m {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..m {
            p[i] = z[i] + beta * p[i];
        }
        it += 1;
    }
    (x, it)
}
