//! Acceptance criteria 1-7. Each test prints one `criterion N: PASS|FAIL` line
//! followed by the numbers it was judged on.

mod common;

use std::collections::HashMap;
use std::time::Instant;

use common::{two_sample_z, wired_c3, wired_k4};
use rand::Rng;
use rayon::prelude::*;
use rswlab_core::dimer::{
    build_temperleyan, estimate_height_moments, gff_target_variance, height_ensemble, height_from_ust, turn_angle,
    unit_square_lattice, winding_of_path, TestFunction,
};
use rswlab_core::env::{generate_poisson_delaunay, generate_square_lattice, PoissonParams};
use rswlab_core::geometry::{for_each_connected_subset, graph_ball, BallIndex, ContainmentIndex, SubsetView};
use rswlab_core::rng::{derive_seed, rng_from_seed};
use rswlab_core::rsw::{compute_r0, crossing_curve, fit_stretched_exponential, lattice_crossing_constant, EnvSpec};
use rswlab_core::stats::chi_square_uniform;
use rswlab_core::ust::{
    edge_inclusion_probabilities, enumerate_wired_trees, full_coupling, wilson_ust, wilson_ust_default,
    wired_tree_count, CouplingParams, WiredGraph,
};
use rswlab_core::walk::{estimate_crossing, exact_crossing, CrossingSpec, Estimator, Orientation};
use rswlab_core::{EmbeddedGraph, Point, Rect};

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[test]
fn criterion_1_crossing_oracle() {
    let t = Instant::now();
    let (reps, walks) = (100u64, 10_000u64);
    let mut ok = true;
    let mut detail = Vec::new();
    for m in [4usize, 8] {
        let mf = m as f64;
        let g = generate_square_lattice(Rect::square(Point::ORIGIN, 3.0 * mf + 2.0), 1.0).unwrap();
        let spec = CrossingSpec::standard(Point::ORIGIN, mf, Orientation::East);
        let exact: HashMap<usize, f64> =
            exact_crossing(&g, &spec).unwrap().rows.iter().map(|r| (r.vertex, r.exact.unwrap())).collect();
        let mut covered: HashMap<usize, u64> = HashMap::new();
        let mut all_at_once = 0;
        for rep in 0..reps {
            let est = estimate_crossing(&g, &spec, walks, derive_seed(1_000 + m as u64, rep));
            assert_eq!(est.rows.len(), exact.len());
            let mut every = true;
            for row in &est.rows {
                assert_eq!(row.capped, 0);
                let (lo, hi) = row.ci(0.99);
                let inside = (lo..=hi).contains(&exact[&row.vertex]);
                *covered.entry(row.vertex).or_default() += u64::from(inside);
                every &= inside;
            }
            all_at_once += u64::from(every);
        }
        let worst = covered.values().copied().min().unwrap();
        ok &= worst >= 95;
        detail.push(format!(
            "m={m}: {} starts, worst start covered in {worst}/{reps} replications, all starts jointly in {all_at_once}/{reps}",
            exact.len()
        ));
    }
    println!("criterion 1: {} ({}; {:.1?})", verdict(ok), detail.join("; "), t.elapsed());
    assert!(ok);
}

#[test]
fn criterion_2_wilson_uniformity() {
    let t = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, wg, want) in [("wired C3", wired_c3(), 3usize), ("K4", wired_k4(), 16)] {
        let count = wired_tree_count(&wg).unwrap();
        let trees = enumerate_wired_trees(&wg, 1 << 20).unwrap();
        let index: HashMap<_, _> = trees.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let mut counts = vec![0u64; trees.len()];
        for s in 0..1_000 * trees.len() as u64 {
            let t = wilson_ust(&wg, wg.interior_ids(), derive_seed(2_000, s)).unwrap();
            counts[index[&t.edges()]] += 1;
        }
        let chi = chi_square_uniform(&counts);
        let exact = count == want.into() && trees.len() == want;
        ok &= exact && chi.p_value > 1e-3;
        detail.push(format!(
            "{name}: {count} trees (enumerated {}), chi2 = {:.2}, p = {:.3}",
            trees.len(),
            chi.statistic,
            chi.p_value
        ));
    }
    println!("criterion 2: {} ({}; {:.1?})", verdict(ok), detail.join("; "), t.elapsed());
    assert!(ok);
}

/// First vertex by distance to the origin whose radius-2 or radius-3 ball has
/// exactly `size` vertices.
fn ball_of_size(g: &EmbeddedGraph, size: usize) -> Option<BallIndex> {
    let mut centers: Vec<usize> = (0..g.len()).collect();
    centers.sort_by(|&a, &b| g.pos(a).dist(Point::ORIGIN).total_cmp(&g.pos(b).dist(Point::ORIGIN)));
    centers.into_iter().find_map(|c| (2..4).map(|r| graph_ball(g, c, r).unwrap()).find(|b| b.len() == size))
}

#[test]
fn criterion_3_lemma_suite() {
    let t = Instant::now();
    let (mut subsets, mut euler, mut contain) = (0u64, 0u64, 0u64);
    let mut bad = Vec::new();
    for seed in 0..5u64 {
        let g = generate_poisson_delaunay(&PoissonParams::new(4.0, Rect::square(Point::ORIGIN, 2.5)), 3_000 + seed)
            .unwrap();
        let ball = ball_of_size(&g, 30).expect("a 30-vertex ball");
        let view = SubsetView::new(&g, &ball.vertices()).unwrap();
        let index = ContainmentIndex::new(&g, &ball).unwrap();
        for_each_connected_subset(&g, Some(&ball.mask(g.len())), 12, |a| {
            subsets += 1;
            let rep = view.report(a).unwrap();
            if rep.simply_connected {
                euler += 1;
                if !rep.euler.is_some_and(|e| e.identity_holds) {
                    bad.push(format!("euler {a:?}"));
                }
            }
            if rep.seventh_bound == Some(false) {
                bad.push(format!("1/7 {a:?}"));
            }
            let c = index.check(a).unwrap();
            if c.hypothesis {
                contain += 1;
                if c.holds != Some(true) {
                    bad.push(format!("containment {a:?} {:?}", c.violation));
                }
            }
        });
    }
    let ok = bad.is_empty();
    println!(
        "criterion 3: {} ({subsets} connected subsets with |A| <= 12 on 5 balls of 30 vertices; Euler checked on {euler} simply connected, containment on {contain} hypothesis instances, 1/7 bound on all; {} violations; {:.1?})",
        verdict(ok),
        bad.len(),
        t.elapsed()
    );
    assert!(ok, "first violations: {:?}", &bad[..bad.len().min(5)]);
}

#[test]
fn criterion_4_rsw_trend() {
    let t = Instant::now();
    let c = 0.5 * lattice_crossing_constant(8);
    let rows =
        crossing_curve(&EnvSpec::Percolation { p: 0.85 }, &[8, 16, 32], c, 200, 4_000, Estimator::Exact, 0.95).unwrap();
    let monotone = rows.windows(2).all(|w| {
        let two_sigma = 2.0 * (w[0].sigma().powi(2) + w[1].sigma().powi(2)).sqrt();
        w[1].p_fail <= w[0].p_fail + two_sigma
    });
    let fit = fit_stretched_exponential(&rows.iter().map(|r| (r.n as f64, r.p_fail)).collect::<Vec<_>>());
    let alpha = fit.as_ref().ok().map(|f| f.alpha);
    let alpha_ok = alpha.is_some_and(|a| a > 0.0 && a <= 1.0);
    let ok = monotone && alpha_ok;
    let curve: Vec<String> = rows.iter().map(|r| format!("n={} {}/{}", r.n, r.failures, r.env_seeds)).collect();
    println!(
        "criterion 4: {} (c = {c:.6}; failures {}; non-increasing within 2 sigma: {monotone}; alpha = {}; {:.1?})",
        verdict(ok),
        curve.join(", "),
        alpha.map_or_else(|| format!("{:?}", fit.err()), |a| format!("{a:.3}")),
        t.elapsed()
    );
    // the lattice constant itself keeps falling with m toward ~0.0012, below c
    let drift: Vec<String> =
        [8, 16, 32].iter().map(|&m| format!("m={m} {:.6}", lattice_crossing_constant(m))).collect();
    println!("criterion 4 note: lattice constants {}", drift.join(", "));
    assert!(ok);
}

fn lattice_domains(delta: f64, inner: f64, outer: f64) -> (WiredGraph, WiredGraph) {
    let g = generate_square_lattice(Rect::square(Point::ORIGIN, outer), delta).unwrap();
    let d2 = WiredGraph::from_rect(&g, &Rect::square(Point::ORIGIN, outer)).unwrap();
    let d1 = d2.with_rect(&Rect::square(Point::ORIGIN, inner)).unwrap();
    (d1, d2)
}

#[test]
fn criterion_5_coupling_contract() {
    let t = Instant::now();
    let delta = 1.0 / 64.0;

    // (a) and (c): two points on D = Λ_8 against Λ_10
    let (d1, d2) = lattice_domains(delta, 8.0, 10.0);
    let r = 2.4;
    let points = [Point::new(-2.5, 0.0), Point::new(2.5, 0.0)];
    let params = CouplingParams { r0: 5.0 * delta, ..Default::default() };
    let runs = 2_000u64;
    let results: Vec<(bool, bool, f64)> = (0..runs)
        .into_par_iter()
        .map(|s| {
            let fc = full_coupling(&d1, &d2, &points, r, params, derive_seed(5_000, s)).unwrap();
            (fc.success(), fc.agreement.iter().all(|&a| a), fc.radius)
        })
        .collect();
    let wins = results.iter().filter(|x| x.0).count();
    let agreeing = results.iter().filter(|x| x.0 && x.1).count();
    let ok_a = wins > 0 && agreeing == wins;
    let p_below = |e: f64| results.iter().filter(|x| x.2 <= e * r).count() as f64 / runs as f64;
    let sigma = |p: f64| (p * (1.0 - p) / runs as f64).sqrt();
    let ladder = [0.5, 0.25, 0.125];
    let ok_c = ladder.windows(2).all(|w| {
        let (p0, p1) = (p_below(w[0]), p_below(w[1]));
        p1 <= p0 + 2.0 * (sigma(p0).powi(2) + sigma(p1).powi(2)).sqrt()
    });
    let fine: Vec<String> =
        [0.5, 0.25, 0.125, 0.05, 0.01, 0.005, 0.001].iter().map(|&e| format!("{e}:{:.4}", p_below(e))).collect();

    // (b): first tree on a 6x6 wired grid against plain Wilson
    let g = generate_square_lattice(Rect::square(Point::new(4.5, 4.5), 4.5), 1.0).unwrap();
    let big = WiredGraph::from_rect(&g, &Rect::square(Point::new(4.5, 4.5), 4.5)).unwrap();
    let small = big.with_rect(&Rect::square(Point::new(4.5, 4.5), 3.5)).unwrap();
    assert_eq!(small.interior_ids().len(), 36);
    let grid_points = [Point::new(3.5, 4.5), Point::new(5.5, 4.5)];
    let grid_params = CouplingParams { r0: 5.0, complete_trees: true, ..Default::default() };
    let n_b = 10_000u64;
    let tally = |trees: Vec<Vec<(usize, usize)>>| {
        let mut m: HashMap<(usize, usize), u64> = HashMap::new();
        for e in trees.into_iter().flatten() {
            *m.entry(e).or_default() += 1;
        }
        m
    };
    let coupled = tally(
        (0..n_b)
            .into_par_iter()
            .map(|s| {
                let fc = full_coupling(&small, &big, &grid_points, 0.5, grid_params, derive_seed(5_100, s)).unwrap();
                fc.tree.check_spanning(&small).unwrap();
                fc.tree.edges()
            })
            .collect(),
    );
    let plain = tally(
        (0..n_b).into_par_iter().map(|s| wilson_ust_default(&small, derive_seed(5_200, s)).unwrap().edges()).collect(),
    );
    let edges = small.edges();
    let get = |m: &HashMap<(usize, usize), u64>, e| m.get(&e).copied().unwrap_or(0);
    let zmax =
        edges.iter().map(|&e| two_sample_z(get(&coupled, e), n_b, get(&plain, e), n_b).abs()).fold(0.0, f64::max);
    let stray = coupled.keys().filter(|e| !edges.contains(e)).count();
    let ok_b = zmax <= 3.0 && stray == 0;
    // logged only: both samples against the exact transfer-current marginals
    let exact = edge_inclusion_probabilities(&small).unwrap();
    let vs_exact = |m: &HashMap<(usize, usize), u64>| {
        let zs: Vec<f64> = exact
            .iter()
            .map(|&(e, q)| (get(m, e) as f64 / n_b as f64 - q) / (q * (1.0 - q) / n_b as f64).sqrt())
            .collect();
        (zs.iter().map(|z| z * z).sum::<f64>(), zs.iter().fold(0.0f64, |a, z| a.max(z.abs())))
    };
    let ((c2, cmax), (p2, pmax)) = (vs_exact(&coupled), vs_exact(&plain));

    let ok = ok_a && ok_b && ok_c;
    println!(
        "criterion 5: {} ((a) {wins}/{runs} runs succeeded, {agreeing} with exact agreement: {}; (b) {} edges, max two-sample |z| = {zmax:.2}: {} [vs exact marginals: coupled sum z^2 {c2:.1}, max {cmax:.2}; wilson sum z^2 {p2:.1}, max {pmax:.2}]; (c) P(R <= e*r) {}: {}; {:.1?})",
        verdict(ok),
        verdict(ok_a),
        edges.len(),
        verdict(ok_b),
        fine.join(" "),
        verdict(ok_c),
        t.elapsed()
    );
    assert!(ok);
}

#[test]
fn criterion_6_height_machinery() {
    let t = Instant::now();

    // winding additivity on random polylines joined end to start
    let mut rng = rng_from_seed(6_000);
    let mut poly = |k: usize| -> Vec<Point> {
        let mut p = vec![Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))];
        while p.len() < k {
            let q = Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if q.dist(*p.last().unwrap()) > 1e-3 {
                p.push(q);
            }
        }
        p
    };
    let mut add_err: f64 = 0.0;
    for k in 0..1_000 {
        let a = poly(2 + k % 9);
        let mut b = poly(2 + k % 7);
        b[0] = *a.last().unwrap();
        if b[1].dist(b[0]) < 1e-3 {
            continue;
        }
        let whole: Vec<Point> = a.iter().chain(&b[1..]).copied().collect();
        let n = a.len();
        let junction = turn_angle(a[n - 1].sub(a[n - 2]), b[1].sub(b[0]));
        let lhs = winding_of_path(&whole).unwrap();
        let rhs = winding_of_path(&a).unwrap() + junction + winding_of_path(&b).unwrap();
        add_err = add_err.max((lhs - rhs).abs());
    }

    let mesh = 1.0 / 32.0;
    let tg = build_temperleyan(&unit_square_lattice(mesh).unwrap()).unwrap();
    let bnd = tg.boundary();
    let x = bnd[0];

    // gauge: moving the reference point shifts every face by one constant
    let mut gauge_err: f64 = 0.0;
    for s in 0..10 {
        let tree = wilson_ust_default(tg.wired(), derive_seed(6_100, s)).unwrap();
        let h = height_from_ust(&tree, &tg, x, mesh).unwrap();
        for &y in [bnd[bnd.len() / 3], bnd[bnd.len() / 2], bnd[bnd.len() - 1]].iter() {
            let hy = height_from_ust(&tree, &tg, y, mesh).unwrap();
            let shift = hy.raw[0] - h.raw[0];
            let spread = hy.raw.iter().zip(&h.raw).map(|(a, b)| (a - b - shift).abs()).fold(0.0, f64::max);
            gauge_err = gauge_err.max(spread);
        }
    }

    // centred ensemble mean of the sine integral
    let unit = Rect::square(Point::new(0.5, 0.5), 0.5);
    let phi = TestFunction::Sine { domain: unit, amp: 1.0 };
    let fields = height_ensemble(&tg, x, mesh, 100, 6_200).unwrap();
    let centring = height_ensemble(&tg, x, mesh, 100, 6_201).unwrap();
    let rep = estimate_height_moments(&fields, Some(&centring), &phi, &tg, &unit).unwrap();
    let target = gff_target_variance(&phi, &unit, 64, 256);
    let ratio = rep.variance / target.variance;

    let ok_add = add_err <= 1e-12;
    let ok_gauge = gauge_err <= 1e-10;
    let ok_mean = rep.mean.abs() <= 3.0 * rep.std_err;
    let ok = ok_add && ok_gauge && ok_mean;
    println!(
        "criterion 6: {} (additivity error {add_err:.2e}; gauge spread {gauge_err:.2e}; sine mean {:.4} vs 3 se {:.4}; variance {:.4}, GFF target {:.5}, ratio {ratio:.2} logged only; {:.1?})",
        verdict(ok),
        rep.mean,
        3.0 * rep.std_err,
        rep.variance,
        target.variance,
        t.elapsed()
    );
    assert!(ok);
}

/// `(delta, eps, C, alpha, R0)` with `R0` evaluated at 60-digit precision on
/// the exact binary values of the inputs.
const R0_TABLE: [(f64, f64, f64, f64, &str); 20] = [
    (0.0625, 0.1, 1.0, 1.0, "0.4904851585921005064902935746932469544854671667974"),
    (0.0625, 0.01, 2.5, 0.5, "7.654405290178462108950254625538368576752422529528"),
    (0.0625, 0.3, 10.0, 0.25, "419.572878125042832046034448732755521647987229945"),
    (0.0625, 0.05, 0.75, 0.8, "0.87429862958836375150563001136847462225374049381161"),
    (0.015625, 0.1, 1.0, 1.0, "0.16594298843302170846115040126444777412608555009687"),
    (0.015625, 0.01, 2.5, 0.5, "2.9925657234158852919851502611860545565721659646609"),
    (0.015625, 0.3, 10.0, 0.25, "305.43958497634273366558886843820045051726715158592"),
    (0.015625, 0.05, 0.75, 0.8, "0.31393046978167741384045314016591317306854123734841"),
    (0.00390625, 0.1, 1.0, 1.0, "0.052316171804504572574931852213895952407701077123596"),
    (0.00390625, 0.01, 2.5, 0.5, "1.0779391578115639422665720322877123637053756931843"),
    (0.00390625, 0.3, 10.0, 0.25, "177.33893153150399219100517747841156554871929463055"),
    (0.00390625, 0.05, 0.75, 0.8, "0.10388339829066213199964708756046154418364077772577"),
    (0.01, 0.1, 1.0, 1.0, "0.11512925464970228562606347593781255959519495455008"),
    (0.01, 0.01, 2.5, 0.5, "2.1702596924328520803326690637740381848484555134251"),
    (0.01, 0.3, 10.0, 0.25, "261.53197195044501149436660702076123812034478138204"),
    (0.01, 0.05, 0.75, 0.8, "0.22144812974753129509155265699980220968490738635479"),
    (0.1, 0.1, 1.0, 1.0, "0.69077552789821372689779686303766185477946998500841"),
    (0.1, 0.01, 2.5, 0.5, "10.254865751346911408464861083579625473016929975727"),
    (0.1, 0.3, 10.0, 0.25, "432.96574366923542358508143015157097390791084807929"),
    // C = e·eps·delta², so the log is one and R0 = delta
    (0.05, 0.3, 0.002038711371344284, 0.5, "0.049999999999999988694405604540053430872940706297917"),
];

#[test]
fn criterion_7_r0_units() {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for &(delta, eps, c, alpha, want) in &R0_TABLE {
        let want: f64 = want.parse().unwrap();
        let got = compute_r0(delta, eps, c, alpha).unwrap();
        worst = worst.max(((got - want) / want).abs());
    }
    let (delta, eps, c, alpha, _) = R0_TABLE[19];
    let unit_log = ((compute_r0(delta, eps, c, alpha).unwrap() - delta) / delta).abs();
    let ok = worst < 5e-11 && unit_log < 5e-11;
    println!(
        "criterion 7: {} (20 grid points, worst relative error {worst:.2e}; unit-log case R0/delta - 1 = {unit_log:.2e}; {:.1?})",
        verdict(ok),
        t.elapsed()
    );
    assert!(ok);
}
