use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;
use rswlab_core::dimer::{build_temperleyan, height_from_ust, turn_angle, winding_of_path};
use rswlab_core::env::{
    coarse_grain_in, delaunay_of_points, generate_percolation_cluster, generate_poisson_delaunay,
    generate_square_lattice, sample_poisson_points, PercolationParams, PoissonParams,
};
use rswlab_core::geometry::{
    boundary_report, diameter_checks, for_each_connected_subset, graph_ball, poincare_constant, poincare_sides,
    ContainmentIndex,
};
use rswlab_core::planar::{faces_with_outer, triangles};
use rswlab_core::rng::{derive_seed, rng_from_seed};
use rswlab_core::rsw::{compute_r0, compute_r_of_z, fit_stretched_exponential};
use rswlab_core::ust::{verify_agreement, wilson_ust, wilson_ust_default, WiredGraph};
use rswlab_core::walk::{
    estimate_crossing, exact_crossing, run_walk, solve_hitting_exact, CrossingSpec, Estimator, Orientation, StopRule,
};
use rswlab_core::{EmbeddedGraph, Point, Rect};

fn delaunay_patch(seed: u64, half: f64, intensity: f64) -> EmbeddedGraph {
    generate_poisson_delaunay(&PoissonParams::new(intensity, Rect::square(Point::ORIGIN, half)), seed).unwrap()
}

/// Triangulation of the Poisson points inside the window; its outer face is
/// the convex hull, so the boundary cycle is simple.
fn hull_patch(seed: u64, half: f64, intensity: f64) -> EmbeddedGraph {
    let window = Rect::square(Point::ORIGIN, half);
    let pts: Vec<Point> = sample_poisson_points(&PoissonParams::new(intensity, window), seed)
        .unwrap()
        .into_iter()
        .filter(|p| window.contains(*p))
        .collect();
    delaunay_of_points(&pts).unwrap()
}

/// All-pairs hop distances by repeated relaxation, independent of BFS.
fn relaxed_distances(g: &EmbeddedGraph) -> Vec<Vec<u32>> {
    let n = g.len();
    let inf = u32::MAX / 2;
    let mut d = vec![vec![inf; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for (u, v) in g.edges() {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn in_circumcircle(a: Point, b: Point, c: Point, p: Point) -> bool {
    let (ax, ay) = (a.x - p.x, a.y - p.y);
    let (bx, by) = (b.x - p.x, b.y - p.y);
    let (cx, cy) = (c.x - p.x, c.y - p.y);
    let det = (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay)
        + (cx * cx + cy * cy) * (ax * by - bx * ay);
    let orient = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    let scale = [a, b, c].iter().map(|q| q.sub(p).dot(q.sub(p))).fold(0.0, f64::max).powi(2);
    det * orient.signum() > 1e-9 * scale
}

/// Turning by unwrapping successive headings.
fn unwrapped_heading_change(path: &[Point]) -> f64 {
    let heads: Vec<f64> = path.windows(2).map(|w| (w[1].y - w[0].y).atan2(w[1].x - w[0].x)).collect();
    let mut total = 0.0;
    for h in heads.windows(2) {
        let mut d = h[1] - h[0];
        while d > std::f64::consts::PI {
            d -= std::f64::consts::TAU;
        }
        while d <= -std::f64::consts::PI {
            d += std::f64::consts::TAU;
        }
        total += d;
    }
    total
}

fn polyline() -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..12).prop_map(|v| {
        let mut pts: Vec<Point> = Vec::new();
        for (x, y) in v {
            let p = Point::new(x, y);
            if pts.last().is_none_or(|q: &Point| q.dist(p) > 1e-3) {
                pts.push(p);
            }
        }
        if pts.len() < 2 {
            pts.push(pts[0].add(Point::new(1.0, 0.5)));
        }
        pts
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lattice_is_a_valid_grid(w in 1usize..12, h in 1usize..12, mesh in prop::sample::select(vec![0.25, 0.5, 1.0])) {
        let bx = Rect::new(Point::ORIGIN, w as f64 * mesh, h as f64 * mesh);
        let g = generate_square_lattice(bx, mesh).unwrap();
        prop_assert!(g.check_invariants().is_ok());
        prop_assert_eq!(g.len(), (2 * w + 1) * (2 * h + 1));
        prop_assert_eq!(g.edge_count(), 2 * w * (2 * h + 1) + 2 * h * (2 * w + 1));
    }

    #[test]
    fn percolation_clusters_are_valid(p in 0.55f64..1.0, n in 2usize..16, seed: u64) {
        let c = generate_percolation_cluster(&PercolationParams::supercritical(p, n), seed).unwrap();
        prop_assert!(c.graph.check_invariants().is_ok());
        prop_assert!(c.largest_fraction > 0.0 && c.largest_fraction <= 1.0);
    }

    #[test]
    fn full_percolation_is_the_lattice(n in 2usize..20, seed: u64) {
        let c = generate_percolation_cluster(&PercolationParams { p: 1.0, n, require_supercritical: false }, seed).unwrap();
        let lattice = generate_square_lattice(Rect::square(Point::ORIGIN, n as f64), 1.0).unwrap();
        prop_assert_eq!(c.graph, lattice);
    }

    #[test]
    fn delaunay_circumcircles_are_empty(seed: u64, intensity in 2.0f64..6.0) {
        let params = PoissonParams::new(intensity, Rect::square(Point::ORIGIN, 2.0));
        let pts = sample_poisson_points(&params, seed).unwrap();
        prop_assume!(pts.len() >= 3 && pts.len() <= 200);
        let Ok(g) = delaunay_of_points(&pts) else { return Ok(()) };
        prop_assert!(g.check_invariants().is_ok());
        for t in triangles(&g) {
            let (a, b, c) = (g.pos(t[0]), g.pos(t[1]), g.pos(t[2]));
            for v in 0..g.len() {
                if !t.contains(&v) {
                    prop_assert!(!in_circumcircle(a, b, c, g.pos(v)), "vertex {} inside circumcircle of {:?}", v, t);
                }
            }
        }
    }

    #[test]
    fn a_red_cells_are_red_and_monotone_in_a(seed: u64, a1 in 1.0f64..20.0, extra in 0.0f64..20.0) {
        let window = Rect::square(Point::ORIGIN, 3.0);
        let pts = sample_poisson_points(&PoissonParams::new(40.0, window), seed).unwrap();
        let lo = coarse_grain_in(&pts, Some(window), 0.5, a1);
        let hi = coarse_grain_in(&pts, Some(window), 0.5, a1 + extra);
        prop_assert_eq!(lo.states.len(), hi.states.len());
        for (x, y) in lo.states.iter().zip(&hi.states) {
            prop_assert_eq!(x.is_red(), y.is_red());
            if *x == rswlab_core::env::CellState::ARed {
                prop_assert_eq!(*y, rswlab_core::env::CellState::ARed);
            }
        }
    }

    #[test]
    fn balls_match_relaxed_distances(seed: u64, r in 0u32..6) {
        let g = delaunay_patch(seed, 1.5, 8.0);
        let d = relaxed_distances(&g);
        let c = seed as usize % g.len();
        let ball = graph_ball(&g, c, r).unwrap();
        let want: Vec<usize> = (0..g.len()).filter(|&v| d[c][v] <= r).collect();
        prop_assert_eq!(ball.vertices(), want);
        let bigger = graph_ball(&g, c, r + 1).unwrap();
        prop_assert!(ball.vertices().iter().all(|&v| bigger.contains(v)));
    }

    #[test]
    fn subset_identities_hold(seed: u64) {
        let g = delaunay_patch(seed, 1.2, 8.0);
        let ambient: Vec<usize> = (0..g.len()).collect();
        let center = g.closest_vertex(Point::ORIGIN).unwrap();
        let ball = graph_ball(&g, center, 3).unwrap();
        let index = ContainmentIndex::new(&g, &ball).unwrap();
        let mut subsets = Vec::new();
        for_each_connected_subset(&g, None, 5, |a| subsets.push(a.to_vec()));
        let mut rng = rng_from_seed(seed);
        for _ in 0..60 {
            let a = &subsets[rng.random_range(0..subsets.len())];
            let rep = boundary_report(&g, &ambient, a).unwrap();
            if let Some(e) = rep.euler {
                if rep.simply_connected {
                    prop_assert!(e.identity_holds, "{:?}", a);
                }
            }
            if let Some(b) = rep.seventh_bound {
                prop_assert!(b);
            }
            let diam = diameter_checks(&g, a, Some(&ball)).unwrap();
            if let Some(c) = &diam.containment {
                prop_assert!(c.holds != Some(false), "{:?}", c);
            }
            prop_assert_eq!(diam.containment.as_ref(), Some(&index.check(a).unwrap()));
            // face data against the induced subgraph built from scratch
            let mut keep = vec![false; g.len()];
            a.iter().for_each(|&v| keep[v] = true);
            let (sub, _) = g.induced(&keep);
            let bounded = faces_with_outer(&sub).map_or(0, |(b, _)| b.len());
            if rep.simply_connected {
                let e = rep.euler.unwrap();
                prop_assert_eq!(e.triangles, bounded);
                prop_assert_eq!(e.edges, sub.edge_count());
            }
        }
    }

    #[test]
    fn poincare_holds_for_random_functions(seed: u64, r in 1u32..4) {
        let g = delaunay_patch(seed, 1.5, 6.0);
        let c = g.closest_vertex(Point::ORIGIN).unwrap();
        let ball = graph_ball(&g, c, r).unwrap();
        prop_assume!(ball.len() >= 2);
        let rep = poincare_constant(&g, &ball, None).unwrap();
        let mut rng = rng_from_seed(seed ^ 1);
        for _ in 0..10 {
            let f: Vec<f64> = (0..ball.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let (var, energy) = poincare_sides(&g, &ball, &f);
            prop_assert!(var <= rep.kappa * energy * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn hitting_solutions_are_harmonic(seed: u64) {
        let g = delaunay_patch(seed, 2.0, 5.0);
        let target: Vec<bool> = (0..g.len()).map(|v| g.pos(v).x < -1.0).collect();
        let kill: Vec<bool> = (0..g.len()).map(|v| g.pos(v).x > 1.0).collect();
        prop_assume!(target.iter().any(|&t| t) && kill.iter().any(|&k| k));
        let sol = solve_hitting_exact(&g, &target, &kill).unwrap();
        let worst = (0..g.len())
            .filter(|&v| !target[v] && !kill[v])
            .map(|v| {
                let nb = g.neighbors(v);
                (sol.h[v] - nb.iter().map(|&w| sol.h[w]).sum::<f64>() / nb.len() as f64).abs()
            })
            .fold(0.0, f64::max);
        prop_assert!(worst < 1e-10);
    }

    #[test]
    fn crossing_verdicts_are_rigid_motion_invariant(seed: u64, dx in -3i32..3, dy in -3i32..3, c in 0.0f64..0.3) {
        let g = delaunay_patch(seed, 4.0, 3.0);
        let spec = CrossingSpec::standard(Point::ORIGIN, 1.0, Orientation::East);
        let base = exact_crossing(&g, &spec).unwrap();
        let by = Point::new(dx as f64, dy as f64);
        let moved = exact_crossing(&g.map_positions(|p| p.add(by)), &spec.translate(by)).unwrap();
        let turned = exact_crossing(&g.map_positions(Point::rot90), &spec.rot90()).unwrap();
        let mc = estimate_crossing(&g, &spec, 50, seed);
        let mc_turned = estimate_crossing(&g.map_positions(Point::rot90), &spec.rot90(), 50, seed);
        for other in [&moved, &turned] {
            prop_assert_eq!(base.rows.len(), other.rows.len());
            let (p, q) = (base.min().map(|m| m.0), other.min().map(|m| m.0));
            if let (Some(p), Some(q)) = (p, q) {
                prop_assert!((p - q).abs() < 1e-9);
                if (p - c).abs() > 1e-8 {
                    prop_assert_eq!(base.verdict(c), other.verdict(c));
                }
            } else {
                prop_assert_eq!(base.verdict(c), other.verdict(c));
            }
        }
        prop_assert_eq!(mc.verdict(c), mc_turned.verdict(c));
    }

    #[test]
    fn walk_traces_are_reproducible(seed: u64) {
        let g = delaunay_patch(seed, 2.0, 4.0);
        let region: Vec<bool> = (0..g.len()).map(|v| g.pos(v).dist_inf(Point::ORIGIN) < 1.5).collect();
        let start = g.closest_vertex(Point::ORIGIN).unwrap();
        let rule = StopRule { target: None, region: Some(&region) };
        let a = serde_json::to_vec(&run_walk(&g, start, rule, seed, 10_000).unwrap()).unwrap();
        let b = serde_json::to_vec(&run_walk(&g, start, rule, seed, 10_000).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn r0_is_monotone(delta in 1e-4f64..0.1, eps in 1e-3f64..0.5, c in 0.5f64..10.0, alpha in 0.2f64..1.0) {
        prop_assume!(c / (eps * delta * delta) > std::f64::consts::E);
        let r = compute_r0(delta, eps, c, alpha).unwrap();
        prop_assert!(compute_r0(delta, eps * 1.01, c, alpha).unwrap() < r);
        prop_assert!(compute_r0(delta, eps, c, alpha * 0.99).unwrap() > r);
    }

    #[test]
    fn wilson_trees_span(seed: u64, half in 1.0f64..2.5) {
        let g = delaunay_patch(seed, half + 0.5, 6.0);
        let wg = WiredGraph::from_rect(&g, &Rect::square(Point::ORIGIN, half)).unwrap();
        let t = wilson_ust_default(&wg, seed).unwrap();
        prop_assert!(t.check_spanning(&wg).is_ok());
        prop_assert_eq!(t.edges().len(), wg.interior_ids().len());
        let mut order = wg.interior_ids().to_vec();
        order.reverse();
        let u = wilson_ust(&wg, &order, seed ^ 7).unwrap();
        prop_assert!(u.check_spanning(&wg).is_ok());
        for bx in [Rect::square(Point::ORIGIN, 0.5), Rect::square(Point::new(0.3, -0.2), 1.0)] {
            prop_assert!(verify_agreement(wg.network(), &t, &t, &bx));
            prop_assert_eq!(verify_agreement(wg.network(), &t, &u, &bx), t.edges_in(wg.network(), &bx) == u.edges_in(wg.network(), &bx));
        }
    }

    #[test]
    fn winding_is_additive(p in polyline(), q in polyline()) {
        let shift = p.last().unwrap().sub(q[0]);
        let q: Vec<Point> = q.iter().map(|x| x.add(shift)).collect();
        let mut pq = p.clone();
        pq.extend_from_slice(&q[1..]);
        let (n, _) = (p.len(), q.len());
        let junction = turn_angle(p[n - 1].sub(p[n - 2]), q[1].sub(q[0]));
        let whole = winding_of_path(&pq).unwrap();
        let parts = winding_of_path(&p).unwrap() + winding_of_path(&q).unwrap() + junction;
        prop_assert!((whole - parts).abs() < 1e-12);
        prop_assert!((whole - unwrapped_heading_change(&pq)).abs() < 1e-12);
    }

    #[test]
    fn temperleyan_graphs_are_valid_and_heights_gauge_shift(seed: u64) {
        let g = hull_patch(seed, 1.5, 6.0);
        let tg = build_temperleyan(&g).unwrap();
        prop_assert!(tg.check_bipartite());
        prop_assert!(tg.check_structure().is_ok());
        let t = wilson_ust_default(tg.wired(), seed).unwrap();
        let b = tg.boundary();
        let x1 = b[seed as usize % b.len()];
        let x2 = b[derive_seed(seed, 1) as usize % b.len()];
        let h1 = height_from_ust(&t, &tg, x1, 1.0).unwrap();
        let h2 = height_from_ust(&t, &tg, x2, 1.0).unwrap();
        let shift: BTreeSet<i64> = h1.raw.iter().zip(&h2.raw).map(|(a, b)| ((b - a) * 1e10).round() as i64).collect();
        let spread = h1.raw.iter().zip(&h2.raw).map(|(a, b)| b - a).fold(f64::NEG_INFINITY, f64::max)
            - h1.raw.iter().zip(&h2.raw).map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
        prop_assert!(spread < 1e-10, "spread {} over {} distinct shifts", spread, shift.len());
        prop_assert_eq!(h1.h[h1.reference_face], 0.0);
    }
}

#[test]
fn compute_r_of_z_is_antitone_in_the_threshold() {
    let delta = 0.25;
    for seed in 0..3 {
        let c = generate_percolation_cluster(&PercolationParams::supercritical(0.7, 36), seed).unwrap();
        let g = c.graph.map_positions(|p| p.scale(delta));
        let z = g.pos(g.closest_vertex(Point::ORIGIN).unwrap());
        let res = compute_r_of_z(&g, z, delta, 0.05, (0, 3), Estimator::Exact, 0.95).unwrap();
        let grid = [0.0, 1e-4, 1e-3, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5];
        for w in grid.windows(2) {
            let (lo, hi) = (res.replay(w[0]), res.replay(w[1]));
            assert!(lo.r <= hi.r && lo.r_low <= hi.r_low && lo.r_high <= hi.r_high);
        }
    }
}

/// Synthetic `exp(−c n^α)` rows at 5 ladder points with 10³ samples each.
#[test]
fn tail_fit_recovers_alpha() {
    let ladder = [1.0, 4.0, 16.0, 64.0, 256.0f64];
    for alpha in [0.3, 0.5, 0.8] {
        let c = 4.0 / 256f64.powf(alpha);
        let mut errs = Vec::new();
        for seed in 0..200u64 {
            let mut rng = rng_from_seed(derive_seed(11, seed));
            let rows: Vec<(f64, f64)> = ladder
                .iter()
                .map(|&n| {
                    let p = (-c * n.powf(alpha)).exp();
                    let k = (0..1000).filter(|_| rng.random::<f64>() < p).count();
                    (n, k as f64 / 1000.0)
                })
                .collect();
            let fit = fit_stretched_exponential(&rows).unwrap();
            assert!(fit.alpha > 0.0);
            errs.push((fit.alpha - alpha).abs());
        }
        let within = errs.iter().filter(|&&e| e <= 0.1).count();
        errs.sort_by(f64::total_cmp);
        assert!(within >= 190, "alpha {alpha}: {within}/200 within 0.1");
        assert!(errs[100] < 0.05, "alpha {alpha}: median error {}", errs[100]);
    }
}
