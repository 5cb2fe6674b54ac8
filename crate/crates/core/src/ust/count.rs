use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::graph::{EmbeddedGraph, VertexId};

use super::wired::WiredGraph;
use super::UstError;

/// Largest reduced Laplacian handled by the exact counters.
pub const COUNT_LIMIT: usize = 1000;

/// Fraction-free Gaussian elimination; exact determinant over the integers.
fn bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Number of spanning trees of a connected graph (matrix-tree theorem).
pub fn spanning_tree_count(g: &EmbeddedGraph) -> Result<BigInt, UstError> {
    if g.len() > COUNT_LIMIT + 1 {
        return Err(UstError::TooLarge { size: g.len(), limit: COUNT_LIMIT + 1 });
    }
    if g.is_empty() || !g.is_connected() {
        return Err(UstError::Disconnected);
    }
    let k = g.len() - 1;
    let mut m = vec![vec![BigInt::zero(); k]; k];
    for (u, row) in m.iter_mut().enumerate() {
        row[u] = BigInt::from(g.degree(u));
        for &w in g.neighbors(u) {
            if w < k {
                row[w] -= 1;
            }
        }
    }
    Ok(bareiss(m))
}

/// Number of spanning trees of the wired graph: the Laplacian restricted to
/// interior vertices, with degrees counted in the ambient graph.
pub fn wired_tree_count(wg: &WiredGraph) -> Result<BigInt, UstError> {
    let ids = wg.interior_ids();
    if ids.len() > COUNT_LIMIT {
        return Err(UstError::TooLarge { size: ids.len(), limit: COUNT_LIMIT });
    }
    let mut local = vec![usize::MAX; wg.len()];
    for (i, &v) in ids.iter().enumerate() {
        local[v] = i;
    }
    let net = wg.network();
    let mut m = vec![vec![BigInt::zero(); ids.len()]; ids.len()];
    for (i, &v) in ids.iter().enumerate() {
        m[i][i] = BigInt::from(net.neighbors(v).len());
        for &w in net.neighbors(v) {
            if local[w as usize] != usize::MAX {
                m[i][local[w as usize]] -= 1;
            }
        }
    }
    Ok(bareiss(m))
}

pub type EdgeProbability = ((VertexId, VertexId), f64);

/// Probability that each edge of the wired graph lies in the wired UST, by
/// the transfer-current theorem: the effective resistance between the ends,
/// with every boundary vertex at the grounded root. Edges as in [`WiredGraph::edges`].
pub fn edge_inclusion_probabilities(wg: &WiredGraph) -> Result<Vec<EdgeProbability>, UstError> {
    let ids = wg.interior_ids();
    if ids.len() > COUNT_LIMIT {
        return Err(UstError::TooLarge { size: ids.len(), limit: COUNT_LIMIT });
    }
    let mut local = vec![usize::MAX; wg.len()];
    for (i, &v) in ids.iter().enumerate() {
        local[v] = i;
    }
    let net = wg.network();
    let k = ids.len();
    let mut lap = DMatrix::<f64>::zeros(k, k);
    for (i, &v) in ids.iter().enumerate() {
        lap[(i, i)] = net.neighbors(v).len() as f64;
        for &w in net.neighbors(v) {
            if local[w as usize] != usize::MAX {
                lap[(i, local[w as usize])] -= 1.0;
            }
        }
    }
    let green = lap.cholesky().ok_or(UstError::Disconnected)?.inverse();
    let gr = |a: usize, b: usize| {
        if a == usize::MAX || b == usize::MAX {
            0.0
        } else {
            green[(a, b)]
        }
    };
    Ok(wg
        .edges()
        .into_iter()
        .map(|(u, v)| {
            let (a, b) = (local[u], local[v]);
            ((u, v), gr(a, a) + gr(b, b) - 2.0 * gr(a, b))
        })
        .collect())
}

/// All spanning trees of the wired graph by filtering edge subsets of size
/// `|interior|` for acyclicity (boundary vertices merged into one root).
/// Each tree is its sorted edge list.
pub fn enumerate_wired_trees(wg: &WiredGraph, max_subsets: u64) -> Result<Vec<Vec<(VertexId, VertexId)>>, UstError> {
    let edges = wg.edges();
    let k = wg.interior_ids().len();
    let m = edges.len();
    let subsets = binomial(m as u64, k as u64);
    if subsets > max_subsets {
        return Err(UstError::TooLarge { size: subsets as usize, limit: max_subsets as usize });
    }
    let root = wg.len();
    let node = |v: VertexId| if wg.is_interior(v) { v } else { root };
    let mut out = Vec::new();
    let mut pick: Vec<usize> = (0..k).collect();
    if k > m {
        return Ok(out);
    }
    loop {
        let mut parent: Vec<usize> = (0..=root).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let acyclic = pick.iter().all(|&e| {
            let (a, b) = (find(&mut parent, node(edges[e].0)), find(&mut parent, node(edges[e].1)));
            if a == b {
                return false;
            }
            parent[a] = b;
            true
        });
        if acyclic {
            out.push(pick.iter().map(|&e| edges[e]).collect());
        }
        // next combination
        let Some(i) = (0..k).rev().find(|&i| pick[i] < m - k + i) else {
            break;
        };
        pick[i] += 1;
        for j in i + 1..k {
            pick[j] = pick[j - 1] + 1;
        }
        if k == 0 {
            break;
        }
    }
    Ok(out)
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
        if r > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    r as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Point, Rect};

    fn cycle(n: usize) -> EmbeddedGraph {
        let pos = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                Point::new(t.cos(), t.sin())
            })
            .collect();
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        EmbeddedGraph::from_edges(pos, &e).unwrap()
    }

    fn k4() -> EmbeddedGraph {
        let pos = vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, 2.0), Point::new(1.0, 0.7)];
        EmbeddedGraph::from_edges(pos, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn inclusion_probabilities_sum_to_the_tree_size() {
        let g = crate::env::generate_square_lattice(Rect::square(Point::new(2.0, 2.0), 2.0), 1.0).unwrap();
        let wg = WiredGraph::from_rect(&g, &Rect::square(Point::new(2.0, 2.0), 2.0)).unwrap();
        let probs = edge_inclusion_probabilities(&wg).unwrap();
        let total: f64 = probs.iter().map(|p| p.1).sum();
        assert!((total - wg.interior_ids().len() as f64).abs() < 1e-9);
        assert!(probs.iter().all(|p| p.1 > 0.0 && p.1 <= 1.0 + 1e-12));
        // frequencies over all 3 trees of the triangle rooted at one vertex
        let tri = EmbeddedGraph::from_edges(
            vec![Point::new(0., 0.), Point::new(1., 0.), Point::new(0., 1.)],
            &[(0, 1), (1, 2), (0, 2)],
        )
        .unwrap();
        let wt = WiredGraph::new(&tri, vec![false, true, true]).unwrap();
        for (e, p) in edge_inclusion_probabilities(&wt).unwrap() {
            assert!((p - 2.0 / 3.0).abs() < 1e-12, "{e:?} {p}");
        }
    }

    #[test]
    fn small_counts() {
        let pos = (0..5).map(|i| Point::new(i as f64, 0.0)).collect();
        let path = EmbeddedGraph::from_edges(pos, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(spanning_tree_count(&path).unwrap(), BigInt::from(1));
        assert_eq!(spanning_tree_count(&cycle(4)).unwrap(), BigInt::from(4));
        assert_eq!(spanning_tree_count(&cycle(9)).unwrap(), BigInt::from(9));
        assert_eq!(spanning_tree_count(&k4()).unwrap(), BigInt::from(16));
    }

    #[test]
    fn wired_count_matches_enumeration() {
        let wg = WiredGraph::new(&k4(), vec![true, true, true, false]).unwrap();
        assert_eq!(wired_tree_count(&wg).unwrap(), BigInt::from(16));
        assert_eq!(enumerate_wired_trees(&wg, 1000).unwrap().len(), 16);
        let wc = WiredGraph::new(&cycle(3), vec![true, true, false]).unwrap();
        assert_eq!(wired_tree_count(&wc).unwrap(), BigInt::from(3));
        assert_eq!(enumerate_wired_trees(&wc, 1000).unwrap().len(), 3);
    }

    #[test]
    fn parallel_root_edges_count_separately() {
        // 3x3 grid wired on its 8 outer vertices: the centre has 4 root edges
        let g = crate::env::generate_square_lattice(Rect::square(Point::ORIGIN, 1.0), 1.0).unwrap();
        let interior: Vec<bool> = g.positions().iter().map(|p| p.x == 0.0 && p.y == 0.0).collect();
        let wg = WiredGraph::new(&g, interior).unwrap();
        assert_eq!(wired_tree_count(&wg).unwrap(), BigInt::from(4));
        assert_eq!(enumerate_wired_trees(&wg, 100).unwrap().len(), 4);
    }

    #[test]
    fn grid_grows_fast() {
        // Kirchhoff count of the 4x4 grid graph
        let g = crate::env::generate_square_lattice(Rect::new(Point::new(1.5, 1.5), 1.5, 1.5), 1.0).unwrap();
        assert_eq!(spanning_tree_count(&g).unwrap(), BigInt::from(100352));
    }
}
