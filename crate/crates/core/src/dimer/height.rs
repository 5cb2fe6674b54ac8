use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geom::Point;
use crate::graph::VertexId;
use crate::rng::derive_seed;
use crate::ust::{wilson_ust_default, SpanningTree};

use super::temperley::TemperleyanGraph;
use super::winding::{turn_angle, winding_of_path};
use super::DimerError;

/// Per-face winding heights.
///
/// `raw[f]` is the winding of the branch from the face representative to the
/// boundary followed by the move along the boundary to the reference vertex;
/// `h` is `raw` shifted to vanish at the reference face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightField {
    pub mesh: f64,
    pub reference_vertex: VertexId,
    pub reference_face: usize,
    pub raw: Vec<f64>,
    pub h: Vec<f64>,
}

impl HeightField {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

/// Branch from `v` to the first boundary vertex, as positions.
fn branch(t: &SpanningTree, tg: &TemperleyanGraph, v: VertexId) -> Result<(Vec<Point>, VertexId), DimerError> {
    let g = tg.primal();
    let mut pts = vec![g.pos(v)];
    let mut u = v;
    while !tg.is_boundary(u) {
        u = t.parent(u).ok_or(DimerError::TreeIncomplete(u))?;
        pts.push(g.pos(u));
    }
    Ok((pts, u))
}

/// Winding heights from a spanning tree of `tg.wired()`, with reference point
/// `x` on the boundary cycle.
///
/// Along the boundary the heading follows the counterclockwise tangent, lifted
/// continuously from the first vertex of the boundary walk; the branch turns
/// into that tangent at its boundary endpoint, and the path ends facing the
/// tangent at `x`. Moving `x` then shifts every height by the same amount.
pub fn height_from_ust(
    t: &SpanningTree,
    tg: &TemperleyanGraph,
    x: VertexId,
    mesh: f64,
) -> Result<HeightField, DimerError> {
    let theta_x = tg.boundary_heading(x).ok_or(DimerError::NotOnBoundary(x))?;
    let reference_face =
        (0..tg.face_count()).find(|&f| tg.faces()[f].walk.contains(&x)).ok_or(DimerError::NotOnBoundary(x))?;
    let raw = (0..tg.face_count())
        .map(|f| {
            let (pts, b) = branch(t, tg, tg.representative(f))?;
            let tangent = tg.boundary_direction(b).expect("branch ends on the boundary");
            let mut w = theta_x - tg.boundary_heading(b).expect("branch ends on the boundary");
            if pts.len() >= 2 {
                let k = pts.len();
                w += winding_of_path(&pts)? + turn_angle(pts[k - 1].sub(pts[k - 2]), tangent);
            }
            Ok(w)
        })
        .collect::<Result<Vec<f64>, DimerError>>()?;
    let base = raw[reference_face];
    let h = raw.iter().map(|&r| r - base).collect();
    Ok(HeightField { mesh, reference_vertex: x, reference_face, raw, h })
}

/// Wilson tree on the wired graph of `tg`, then its heights.
pub fn sample_height_field(
    tg: &TemperleyanGraph,
    x: VertexId,
    mesh: f64,
    seed: u64,
) -> Result<HeightField, DimerError> {
    let t = wilson_ust_default(tg.wired(), seed)?;
    height_from_ust(&t, tg, x, mesh)
}

/// `n` independent fields, member `k` seeded by `derive_seed(master, k)`.
pub fn height_ensemble(
    tg: &TemperleyanGraph,
    x: VertexId,
    mesh: f64,
    n: usize,
    master: u64,
) -> Result<Vec<HeightField>, DimerError> {
    (0..n as u64).into_par_iter().map(|k| sample_height_field(tg, x, mesh, derive_seed(master, k))).collect()
}

#[cfg(test)]
mod tests {
    use super::super::temperley::{build_temperleyan, unit_square_lattice};
    use super::*;
    use crate::ust::wilson_ust_default;

    #[test]
    fn reference_face_is_zero_and_gauge_is_constant() {
        let tg = build_temperleyan(&unit_square_lattice(1.0 / 8.0).unwrap()).unwrap();
        let t = wilson_ust_default(tg.wired(), 3).unwrap();
        let b = tg.boundary();
        let a = height_from_ust(&t, &tg, b[0], 0.125).unwrap();
        assert_eq!(a.h[a.reference_face], 0.0);
        for &x in &b[1..] {
            let c = height_from_ust(&t, &tg, x, 0.125).unwrap();
            let shift: Vec<f64> = a.raw.iter().zip(&c.raw).map(|(p, q)| q - p).collect();
            let spread =
                shift.iter().cloned().fold(f64::MIN, f64::max) - shift.iter().cloned().fold(f64::MAX, f64::min);
            assert!(spread < 1e-10);
        }
    }

    #[test]
    fn reference_must_be_on_boundary() {
        let g = unit_square_lattice(0.25).unwrap();
        let tg = build_temperleyan(&g).unwrap();
        let t = wilson_ust_default(tg.wired(), 0).unwrap();
        let inner = tg.wired().interior_ids()[0];
        assert_eq!(height_from_ust(&t, &tg, inner, 0.25).unwrap_err(), DimerError::NotOnBoundary(inner));
    }

    #[test]
    fn incomplete_tree_is_an_error() {
        let tg = build_temperleyan(&unit_square_lattice(0.25).unwrap()).unwrap();
        let t = SpanningTree::empty(tg.primal_count());
        let x = tg.boundary()[0];
        assert!(matches!(height_from_ust(&t, &tg, x, 0.25), Err(DimerError::TreeIncomplete(_))));
    }

    /// Vertices of the 5×5 lattice on the unit square are `5j + i` at `(i/4, j/4)`.
    fn comb(tg: &TemperleyanGraph) -> SpanningTree {
        let id = |i: usize, j: usize| 5 * j + i;
        let mut t = SpanningTree::empty(tg.primal_count());
        t.graft(vec![id(1, 3), id(1, 2), id(1, 1), id(1, 0)]);
        t.graft(vec![id(2, 3), id(2, 2), id(2, 1), id(2, 0)]);
        t.graft(vec![id(3, 3), id(3, 2), id(3, 1), id(2, 1)]);
        t.check_spanning(tg.wired()).unwrap();
        t
    }

    fn face_with_rep(tg: &TemperleyanGraph, v: VertexId) -> usize {
        (0..tg.face_count()).find(|&f| tg.representative(f) == v).unwrap()
    }

    #[test]
    fn straight_branch_into_straight_arc_gives_the_corner_angle() {
        let tg = build_temperleyan(&unit_square_lattice(0.25).unwrap()).unwrap();
        let t = comb(&tg);
        let f = face_with_rep(&tg, 12);
        // branch 12 -> 7 -> 2 hits the bottom side at (1/2, 0)
        let b = 2;
        let pb = tg.boundary_position(b).unwrap();
        let l = tg.boundary().len();
        let mut k = pb;
        loop {
            let x = tg.boundary()[k];
            if tg.primal().pos(x).x >= 1.0 {
                break;
            }
            let hf = height_from_ust(&t, &tg, x, 0.25).unwrap();
            assert!((hf.raw[f] - std::f64::consts::FRAC_PI_2).abs() < 1e-12, "x = {x}: {}", hf.raw[f]);
            // the corner and the cut end the straight arc
            if k + 1 == l {
                break;
            }
            k += 1;
        }
    }

    #[test]
    fn merged_branches_differ_by_their_stubs() {
        let tg = build_temperleyan(&unit_square_lattice(0.25).unwrap()).unwrap();
        let t = comb(&tg);
        let g = tg.primal();
        let (a, b) = (face_with_rep(&tg, 12), face_with_rep(&tg, 8));
        let stub = |v: VertexId| winding_of_path(&[g.pos(v), g.pos(7), g.pos(2)]).unwrap();
        for &x in tg.boundary() {
            let hf = height_from_ust(&t, &tg, x, 0.25).unwrap();
            let d = hf.h[a] - hf.h[b];
            assert!((d - (stub(12) - stub(8))).abs() < 1e-12);
            assert!((d + std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        }
    }
}
