//! Oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rswlab_core::ust::WiredGraph;
use rswlab_core::{EmbeddedGraph, Point};

pub fn graph(pos: &[(f64, f64)], edges: &[(usize, usize)]) -> EmbeddedGraph {
    EmbeddedGraph::from_edges(pos.iter().map(|&(x, y)| Point::new(x, y)).collect(), edges).unwrap()
}

pub fn wired(g: &EmbeddedGraph, boundary: &[usize]) -> WiredGraph {
    let interior = (0..g.len()).map(|v| !boundary.contains(&v)).collect();
    WiredGraph::new(g, interior).unwrap()
}

/// Triangle with vertex 0 as the root: 3 trees.
pub fn wired_c3() -> WiredGraph {
    wired(&graph(&[(0., 0.), (1., 0.), (0.5, 1.)], &[(0, 1), (1, 2), (0, 2)]), &[0])
}

/// K4 with vertex 0 as the root: 16 trees.
pub fn wired_k4() -> WiredGraph {
    let g = graph(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)], &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    wired(&g, &[0])
}

/// Two-sample z statistic for Bernoulli frequencies.
pub fn two_sample_z(k1: u64, n1: u64, k2: u64, n2: u64) -> f64 {
    let (p1, p2) = (k1 as f64 / n1 as f64, k2 as f64 / n2 as f64);
    let pool = (k1 + k2) as f64 / (n1 + n2) as f64;
    let se = (pool * (1.0 - pool) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    if se == 0.0 {
        return if p1 == p2 { 0.0 } else { f64::INFINITY };
    }
    (p1 - p2) / se
}

/// Law of the loop-erased path from `start` to `absorbing`, by summing over all
/// walks of at most `max_len` steps. Returns the law and the missing mass.
pub fn erased_path_law(
    adj: &[Vec<usize>],
    start: usize,
    absorbing: &[bool],
    max_len: usize,
) -> (BTreeMap<Vec<usize>, f64>, f64) {
    fn erase(walk: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for &v in walk {
            if let Some(i) = out.iter().position(|&u| u == v) {
                out.truncate(i + 1);
            } else {
                out.push(v);
            }
        }
        out
    }
    fn rec(
        adj: &[Vec<usize>],
        absorbing: &[bool],
        walk: &mut Vec<usize>,
        p: f64,
        left: usize,
        law: &mut BTreeMap<Vec<usize>, f64>,
        lost: &mut f64,
    ) {
        let v = *walk.last().unwrap();
        if absorbing[v] {
            *law.entry(erase(walk)).or_insert(0.0) += p;
            return;
        }
        if left == 0 {
            *lost += p;
            return;
        }
        let q = p / adj[v].len() as f64;
        for &w in &adj[v] {
            walk.push(w);
            rec(adj, absorbing, walk, q, left - 1, law, lost);
            walk.pop();
        }
    }
    let mut law = BTreeMap::new();
    let mut lost = 0.0;
    rec(adj, absorbing, &mut vec![start], 1.0, max_len, &mut law, &mut lost);
    (law, lost)
}
