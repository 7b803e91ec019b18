//! End-to-end acceptance checks, one numbered test per guarantee:
//! closed-form oracles for the update and search primitives, statistical
//! orderings for the three packaged studies, and byte-level
//! reproducibility of the emitted artifacts. Each test prints a one-line
//! verdict with its measured runtime and enforces its stated budget.

use std::f64::consts::TAU;
use std::fs;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use wayscout_cli::commands::{dispatch, rerun_manifest};
use wayscout_cli::config::Config;
use wayscout_cli::experiments::{
    apply_preset, build_world, mission_comparison, profile_routes, spread_rows,
};
use wayscout_core::planner::{plan_diverse_routes, shortest_path};
use wayscout_core::rng::seeded_rng;
use wayscout_core::roadmap::place_generators;
use wayscout_core::scoring::score_all;
use wayscout_core::{
    CellIndex, Point, Rect, Roadmap, SurveyReport, TwoValueCostmap, UpdateMode, VoronoiDiagram,
};

/// Prints the one-line verdict and enforces the runtime budget, if any.
fn finish(label: &str, t0: Instant, budget: Option<Duration>, detail: &str) {
    let dt = t0.elapsed();
    if let Some(b) = budget {
        assert!(dt < b, "{label}: took {dt:?}, budget {b:?}");
    }
    println!("{label}: PASS ({detail}; {dt:.2?})");
}

#[test]
fn c01_zero_gamma_diversity_collapses_to_the_shortest_path() {
    let t0 = Instant::now();
    let cfg = Config::default();
    for seed in 0..20u64 {
        let world = build_world(&cfg, seed).expect("world");
        let mut scored = world.roadmap.clone();
        score_all(&mut scored, &world.truth, &cfg.gains().unwrap()).unwrap();
        let mut zero = cfg.clone();
        zero.gamma = 0.0;
        let routes = plan_diverse_routes(&scored, 3, &zero.penalty().unwrap()).unwrap();
        let want = shortest_path(&scored).unwrap();
        for (k, r) in routes.iter().enumerate() {
            assert_eq!(r, &want, "seed {seed}: route {k} differs from the shortest path");
        }
    }
    finish("c01 zero-gamma identity", t0, Some(Duration::from_secs(10)), "20/20 seeds exact");
}

#[test]
fn c02_incremental_mean_matches_exact_recomputation() {
    let t0 = Instant::now();
    let mut rng = seeded_rng(0x5EED_0002);
    let cell = CellIndex::new(0, 0);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let vals: Vec<f64> = (0..9).map(|_| rng.random_range(-10.0..10.0)).collect();
        let mut map = TwoValueCostmap::from_subcells(1, 9, 90.0, 0, vals.clone()).unwrap();
        let mut shadow = vals;
        for _ in 0..rng.random_range(1..=30) {
            let s = rng.random_range(0..9);
            let v = rng.random_range(-10.0..10.0);
            map.apply_survey(
                &SurveyReport { cell, subcell: s, value: v },
                UpdateMode::Incremental,
            )
            .unwrap();
            shadow[s] = v;
            let exact = shadow.iter().sum::<f64>() / 9.0;
            let err = (map.cell_mean(cell) - exact).abs();
            worst = worst.max(err);
            assert!(err <= 1e-9, "incremental mean drifted by {err}");
        }
    }
    finish(
        "c02 incremental-mean exactness",
        t0,
        Some(Duration::from_secs(5)),
        &format!("1000 sequences, worst error {worst:.3e}"),
    );
}

#[test]
fn c03_surveying_every_subcell_converges_to_the_true_statistics() {
    let t0 = Instant::now();
    let mut rng = seeded_rng(0x5EED_0003);
    let cell = CellIndex::new(0, 0);
    let cases = 200;
    let mut worst_inc_var = 0.0f64;
    let mut sum_inc_var = 0.0f64;
    for _ in 0..cases {
        let truth: Vec<f64> = (0..9).map(|_| rng.random_range(0.0..10.0)).collect();
        let prior: Vec<f64> = (0..9).map(|_| rng.random_range(0.0..10.0)).collect();
        let mu = truth.iter().sum::<f64>() / 9.0;
        let var = truth.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / 9.0;
        let mut order: Vec<usize> = (0..9).collect();
        order.shuffle(&mut rng);
        let mut exact = TwoValueCostmap::from_subcells(1, 9, 90.0, 0, prior.clone()).unwrap();
        let mut inc = TwoValueCostmap::from_subcells(1, 9, 90.0, 0, prior).unwrap();
        for &s in &order {
            let rep = SurveyReport { cell, subcell: s, value: truth[s] };
            exact.apply_survey(&rep, UpdateMode::Exact).unwrap();
            inc.apply_survey(&rep, UpdateMode::Incremental).unwrap();
        }
        assert!((exact.cell_mean(cell) - mu).abs() <= 1e-9, "exact-mode mean misses the truth");
        assert!(
            (exact.cell_variance(cell) - var).abs() <= 1e-9,
            "exact-mode variance misses the truth"
        );
        // The mean recurrence is algebraically exact, so it converges too.
        assert!((inc.cell_mean(cell) - mu).abs() <= 1e-9, "incremental mean misses the truth");
        let d = (inc.cell_variance(cell) - var).abs();
        worst_inc_var = worst_inc_var.max(d);
        sum_inc_var += d;
    }
    // The approximate variance recurrence is not expected to converge;
    // its residual is reported, not gated.
    finish(
        "c03 full-survey convergence",
        t0,
        None,
        &format!(
            "{cases} cells exact to 1e-9; incremental variance residual mean {:.3}, max {:.3}",
            sum_inc_var / cases as f64,
            worst_inc_var
        ),
    );
}

/// Connected random graph on a circle: a shuffled chain guarantees a
/// start-to-end path, then extra edges fill in at random.
fn random_graph(rng: &mut ChaCha12Rng) -> Roadmap {
    let bounds = Rect::new(0.0, 0.0, 100.0, 100.0).unwrap();
    let n = rng.random_range(2..=10);
    let vertices: Vec<Point> = (0..n)
        .map(|i| {
            let th = TAU * i as f64 / n as f64;
            Point::new(50.0 + 40.0 * th.cos(), 50.0 + 40.0 * th.sin())
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for w in order.windows(2) {
        edges.push((w[0], w[1], rng.random_range(0.1..10.0)));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !edges.iter().any(|&(a, b, _)| (a.min(b), a.max(b)) == (i, j))
                && rng.random_range(0.0..1.0) < 0.35
            {
                edges.push((i, j, rng.random_range(0.1..10.0)));
            }
        }
    }
    Roadmap::from_parts(vertices, &edges, bounds)
        .unwrap()
        .with_endpoints(0, n - 1)
        .unwrap()
}

/// Cheapest start-to-end cost by trying every simple path, accumulating
/// forward so equal paths sum in the same order as the planner.
fn exhaustive_best(rm: &Roadmap) -> f64 {
    fn dfs(rm: &Roadmap, u: usize, end: usize, visited: &mut Vec<bool>, acc: f64, best: &mut f64) {
        if u == end {
            if acc < *best {
                *best = acc;
            }
            return;
        }
        for v in rm.neighbors(u) {
            if !visited[v] {
                visited[v] = true;
                dfs(rm, v, end, visited, acc + rm.edge_cost(u, v), best);
                visited[v] = false;
            }
        }
    }
    let (s, e) = rm.endpoints().unwrap();
    let mut visited = vec![false; rm.vertex_count()];
    visited[s] = true;
    let mut best = f64::INFINITY;
    dfs(rm, s, e, &mut visited, 0.0, &mut best);
    best
}

#[test]
fn c04_cheapest_route_matches_exhaustive_enumeration() {
    let t0 = Instant::now();
    let mut rng = seeded_rng(0x5EED_0004);
    for case in 0..200 {
        let rm = random_graph(&mut rng);
        let route = shortest_path(&rm).unwrap();
        let want = exhaustive_best(&rm);
        assert_eq!(route.total_cost, want, "case {case}: route cost is not the enumerated optimum");
    }
    finish("c04 shortest-path oracle", t0, Some(Duration::from_secs(30)), "200/200 graphs exact");
}

#[test]
fn c05_sampled_points_land_in_their_nearest_generator_cell() {
    let t0 = Instant::now();
    let bounds = Rect::new(0.0, 0.0, 2000.0, 2000.0).unwrap();
    let mut rng = seeded_rng(0x5EED_0005);
    for seed in 0..20u64 {
        let gens = place_generators(&bounds, 100, seed).unwrap();
        let vd = VoronoiDiagram::build(&gens, &bounds).unwrap();
        for _ in 0..1000 {
            let p = Point::new(rng.random_range(0.0..2000.0), rng.random_range(0.0..2000.0));
            let cell = vd.locate(p).expect("cells cover the bounds");
            let here = p.distance(vd.generators()[cell]);
            let nearest =
                vd.generators().iter().map(|g| p.distance(*g)).fold(f64::INFINITY, f64::min);
            assert!(
                here <= nearest + 1e-9,
                "seed {seed}: point sits {here} m from its cell's generator \
                 but {nearest} m from the nearest one"
            );
        }
    }
    finish("c05 voronoi membership", t0, Some(Duration::from_secs(30)), "20 maps x 1000 points");
}

#[test]
fn c06_gain_profiles_order_route_length_and_variance() {
    let t0 = Instant::now();
    let mut cfg = Config::default();
    apply_preset("exp1", &mut cfg);
    let mut red_le_blue = 0;
    let mut green_min_var = 0;
    for seed in 0..20u64 {
        let (_, rows) = profile_routes(&cfg, seed).expect("experiment seed");
        assert_eq!(rows[0].profile, "red");
        assert_eq!(rows[1].profile, "blue");
        assert_eq!(rows[2].profile, "green");
        if rows[0].length <= rows[1].length {
            red_le_blue += 1;
        }
        if rows[2].var_integral <= rows[0].var_integral
            && rows[2].var_integral <= rows[1].var_integral
        {
            green_min_var += 1;
        }
    }
    assert!(
        red_le_blue >= 16,
        "the distance-weighted route was shortest in only {red_le_blue}/20 seeds (need 16)"
    );
    assert!(
        green_min_var >= 16,
        "the variance-weighted route had minimal variance in only {green_min_var}/20 seeds (need 16)"
    );
    finish(
        "c06 gain-profile ordering",
        t0,
        Some(Duration::from_secs(120)),
        &format!("red<=blue {red_le_blue}/20, green min-variance {green_min_var}/20"),
    );
}

#[test]
fn c07_spread_settings_order_mean_dissimilarity() {
    let t0 = Instant::now();
    let mut cfg = Config::default();
    apply_preset("exp2", &mut cfg);
    let mut high_gt_low = 0;
    for seed in 0..20u64 {
        let (_, rows) = spread_rows(&cfg, seed).expect("experiment seed");
        let (low, high) = (&rows[0], &rows[1]);
        assert_eq!(low.setting, "low_spread");
        assert_eq!(high.setting, "high_spread");
        // The first route is planned before any penalty exists, so both
        // settings share it.
        assert_eq!(low.routes[0].vertices, high.routes[0].vertices, "seed {seed}");
        assert!(low.mean_dissimilarity > 0.0, "seed {seed}: low-spread team collapsed");
        assert!(high.mean_dissimilarity > 0.0, "seed {seed}: high-spread team collapsed");
        if high.mean_dissimilarity > low.mean_dissimilarity {
            high_gt_low += 1;
        }
    }
    assert!(
        high_gt_low >= 14,
        "the high-spread setting separated its team farther than low-spread in only \
         {high_gt_low}/20 seeds (need 14). Both settings' peaks dwarf the terrain costs, so \
         either one evicts later routes from a committed corridor; at the separations where \
         teams then settle, the wide low-spread bump still pushes while the narrow high-spread \
         bump has already died off, which inverts the intended ordering. See `Known behavior` \
         in the README."
    );
    finish(
        "c07 spread-setting ordering",
        t0,
        Some(Duration::from_secs(180)),
        &format!("high>low {high_gt_low}/20"),
    );
}

#[test]
fn c08_surveying_improves_the_committed_route() {
    let t0 = Instant::now();
    let mut cfg = Config::default();
    apply_preset("exp3", &mut cfg);
    let mut improved = 0;
    for seed in 0..50u64 {
        let (_, cmp) = mission_comparison(&cfg, seed).expect("mission seed");
        if cmp.cost_post <= cmp.cost_apriori {
            improved += 1;
        }
        // Tolerance covers summation-order noise when a route traverses an
        // edge opposite to the orientation it was scored in.
        let tol = 1e-9;
        assert!(
            cmp.cost_best <= cmp.cost_post * (1.0 + tol),
            "seed {seed}: the full-knowledge optimum was beaten by the post-mission route"
        );
        assert!(
            cmp.cost_best <= cmp.cost_apriori * (1.0 + tol),
            "seed {seed}: the full-knowledge optimum was beaten by the a-priori route"
        );
        assert!(cmp.surveyed_fraction > 0.0, "seed {seed}: the mission surveyed nothing");
    }
    assert!(
        improved >= 30,
        "the post-mission route beat the a-priori route in only {improved}/50 seeds (need 30)"
    );
    finish(
        "c08 exploration value",
        t0,
        Some(Duration::from_secs(600)),
        &format!("post<=apriori {improved}/50, optimum never beaten"),
    );
}

#[test]
fn c09_manifest_reruns_reproduce_metrics_byte_for_byte() {
    let t0 = Instant::now();
    let base = std::env::temp_dir().join(format!("wayscout-acceptance-{}", std::process::id()));
    let _ = fs::remove_dir_all(&base);
    for (exp, n_seeds, files) in [
        ("exp1", 3u64, &["metrics.tsv"][..]),
        ("exp2", 2, &["metrics.tsv", "summary.tsv"][..]),
        ("exp3", 2, &["metrics.tsv"][..]),
    ] {
        let mut cfg = Config::default();
        apply_preset(exp, &mut cfg);
        let seeds: Vec<u64> = (0..n_seeds).collect();
        let first = base.join(exp).join("first");
        let again = base.join(exp).join("again");
        dispatch(exp, &cfg, &seeds, &first, false).expect("first run");
        rerun_manifest(&first.join("manifest.txt"), &again, false).expect("rerun");
        for f in files {
            let a = fs::read(first.join(f)).expect("first metrics");
            let b = fs::read(again.join(f)).expect("rerun metrics");
            assert_eq!(a, b, "{exp}/{f} differs between a run and its manifest rerun");
        }
        let a = fs::read(first.join("manifest.txt")).unwrap();
        let b = fs::read(again.join("manifest.txt")).unwrap();
        assert_eq!(a, b, "{exp}/manifest.txt differs between a run and its rerun");
    }
    let _ = fs::remove_dir_all(&base);
    finish("c09 manifest determinism", t0, None, "exp1+exp2+exp3 reruns byte-identical");
}

#[test]
fn c10_uniform_gain_scaling_rescales_costs_and_keeps_the_path() {
    let t0 = Instant::now();
    let cfg = Config::default();
    let mut rng = seeded_rng(0x5EED_0010);
    for seed in 0..20u64 {
        let world = build_world(&cfg, seed).expect("world");
        let gains = cfg.gains().unwrap();
        let lambda = 10f64.powf(rng.random_range(-3.0..3.0));
        let scaled = gains.scaled(lambda).unwrap();
        let mut plain = world.roadmap.clone();
        score_all(&mut plain, &world.truth, &gains).unwrap();
        let mut boosted = world.roadmap.clone();
        score_all(&mut boosted, &world.truth, &scaled).unwrap();
        for (i, j) in plain.edge_pairs() {
            let want = lambda * plain.edge_cost(i, j);
            let got = boosted.edge_cost(i, j);
            assert!(
                (got - want).abs() <= 1e-12 * want.abs(),
                "seed {seed}: edge ({i}, {j}) scaled to {got}, want {want}"
            );
        }
        let r1 = shortest_path(&plain).unwrap();
        let r2 = shortest_path(&boosted).unwrap();
        assert_eq!(r1.vertices, r2.vertices, "seed {seed}: scaling changed the chosen path");
    }
    finish("c10 gain-scaling linearity", t0, None, "20 instances, path invariant");
}
