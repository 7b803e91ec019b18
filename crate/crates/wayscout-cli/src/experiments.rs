//! Seeded experiment drivers: three comparative studies over generated
//! worlds, each emitting a manifest, a metrics table, and rendered
//! overlays. `exp1` compares gain profiles on a perfectly known map,
//! `exp2` compares two diversity-penalty settings, and `exp3` weighs a
//! survey mission's final route against planning on prior data alone.

use std::path::Path;

use anyhow::Result;
use wayscout_core::mission::{run_mission_with, MissionResult};
use wayscout_core::planner::{plan_diverse_routes, route_dissimilarity, shortest_path};
use wayscout_core::rng::{derive_seed, STREAM_ESTIMATE, STREAM_GENERATORS, STREAM_TRUTH};
use wayscout_core::roadmap::{build_voronoi_roadmap, place_generators};
use wayscout_core::scoring::score_all;
use wayscout_core::{GainSet, PenaltyParams, Roadmap, Route, TwoValueCostmap};

use crate::config::Config;
use crate::formats::{fmt_f64, manifest_to_string, write_file, Manifest, TsvWriter};
use crate::svg::{SvgScene, ROUTE_COLORS};

/// One seed's world: true terrain, a-priori estimate, and the
/// endpoint-bearing roadmap. Each piece comes from its own seed stream,
/// so regenerating any one of them reproduces it exactly.
pub struct World {
    pub truth: TwoValueCostmap,
    pub estimate: TwoValueCostmap,
    pub roadmap: Roadmap,
}

pub fn build_world(cfg: &Config, seed: u64) -> Result<World> {
    let terrain = cfg.terrain()?;
    let bounds = cfg.bounds()?;
    let gens =
        place_generators(&bounds, cfg.generator_count, derive_seed(seed, STREAM_GENERATORS))?;
    let truth = terrain.generate(derive_seed(seed, STREAM_TRUTH))?;
    let estimate = terrain.generate(derive_seed(seed, STREAM_ESTIMATE))?;
    let roadmap = build_voronoi_roadmap(&gens, &bounds)?
        .insert_endpoints(cfg.start(), cfg.goal(), cfg.k_connect)?;
    Ok(World { truth, estimate, roadmap })
}

/// Experiment-specific defaults, layered over the base config before
/// any config file or command-line overrides.
pub fn apply_preset(experiment: &str, cfg: &mut Config) {
    match experiment {
        "exp1" => {
            cfg.gamma = 10.0;
            cfg.sigma_sq = 0.001;
        }
        "exp3" => {
            cfg.k1 = 0.0;
            cfg.k2 = 1.0;
            cfg.k3 = 0.0;
            cfg.gamma = 10.0;
            cfg.sigma_sq = 0.0001;
        }
        _ => {}
    }
}

/// How many consecutive seeds an experiment runs when none are given.
pub fn default_seed_count(experiment: &str) -> usize {
    match experiment {
        "exp1" | "exp2" => 20,
        "exp3" => 50,
        _ => 1,
    }
}

/// The gain profiles of the first study, named by the color each route
/// renders in: red weights distance most, blue prices only the mean,
/// green is dominated by variance.
pub const GAIN_PROFILES: [(&str, f64, f64, f64); 3] =
    [("red", 30.0, 10.0, 10.0), ("blue", 0.0, 30.0, 0.0), ("green", 0.0, 2.0, 5.0)];

/// One profile's route on the true map, with its gain-free integrals.
pub struct ProfileRoute {
    pub profile: &'static str,
    pub route: Route,
    pub length: f64,
    pub mu_integral: f64,
    pub var_integral: f64,
    /// Cost of the route under the profile's own gains, penalty-free.
    pub cost: f64,
}

/// Plans one route per gain profile on the true map. A single vehicle
/// plans each route on its own, so no diversity penalty applies; the
/// profiles differ only in how their gains weigh the same terrain.
pub fn profile_routes(cfg: &Config, seed: u64) -> Result<(World, Vec<ProfileRoute>)> {
    let world = build_world(cfg, seed)?;
    let mut out = Vec::new();
    for (name, k1, k2, k3) in GAIN_PROFILES {
        let gains = GainSet::new(k1, k2, k3)?;
        let mut scored = world.roadmap.clone();
        score_all(&mut scored, &world.truth, &gains)?;
        let route = shortest_path(&scored)?;
        let b = route.rescore(&world.truth, &gains)?;
        out.push(ProfileRoute {
            profile: name,
            route,
            length: b.length,
            mu_integral: b.mu_integral,
            var_integral: b.var_integral,
            cost: b.total,
        });
    }
    Ok((world, out))
}

pub fn run_exp1(cfg: &Config, seeds: &[u64], out: &Path, render_all: bool) -> Result<()> {
    write_manifest("exp1", cfg, seeds, out)?;
    let mut tsv =
        TsvWriter::new(&["seed", "profile", "length", "mu_integral", "var_integral", "cost"]);
    for (n, &seed) in seeds.iter().enumerate() {
        let (world, rows) = profile_routes(cfg, seed)?;
        for r in &rows {
            tsv.row(&[
                seed.to_string(),
                r.profile.to_string(),
                fmt_f64(r.length),
                fmt_f64(r.mu_integral),
                fmt_f64(r.var_integral),
                fmt_f64(r.cost),
            ]);
        }
        if render_all || n == 0 {
            let mut scene = SvgScene::new(world.truth.bounds());
            scene.add_costmap(&world.truth);
            scene.add_roadmap(&world.roadmap);
            for (i, r) in rows.iter().enumerate() {
                scene.add_route(&r.route, ROUTE_COLORS[i % ROUTE_COLORS.len()], 4.0);
            }
            scene.add_endpoint_markers(cfg.start(), cfg.goal());
            write_file(&out.join(format!("exp1_seed{seed}.svg")), &scene.finish())?;
        }
    }
    write_file(&out.join("metrics.tsv"), &tsv.finish())
}

/// The two diversity-penalty settings of the second study: a moderate
/// wide bump against a taller, much narrower one. Both peaks dwarf the
/// terrain's edge costs, so either setting evicts later routes from a
/// committed corridor; they differ in how far the push reaches.
pub const SPREAD_SETTINGS: [(&str, f64, f64); 2] =
    [("low_spread", 100.0, 0.0003), ("high_spread", 500.0, 0.00003)];

/// One setting's route team and its pairwise separations.
pub struct SpreadRow {
    pub setting: &'static str,
    pub routes: Vec<Route>,
    /// Dissimilarity per route pair, in (0,1), (0,2), (1,2) order.
    pub pairwise: Vec<f64>,
    pub mean_dissimilarity: f64,
}

/// Plans a diverse route team on the true map under both penalty
/// settings; everything but gamma and the bump width is shared.
pub fn spread_rows(cfg: &Config, seed: u64) -> Result<(World, Vec<SpreadRow>)> {
    let world = build_world(cfg, seed)?;
    let mut scored = world.roadmap.clone();
    score_all(&mut scored, &world.truth, &cfg.gains()?)?;
    let mut out = Vec::new();
    for (name, gamma, sigma_sq) in SPREAD_SETTINGS {
        let mut c = cfg.clone();
        c.gamma = gamma;
        c.sigma_sq = sigma_sq;
        let params: PenaltyParams = c.penalty()?;
        let routes = plan_diverse_routes(&scored, cfg.n_routes, &params)?;
        let mut pairwise = Vec::new();
        for i in 0..routes.len() {
            for j in i + 1..routes.len() {
                pairwise.push(route_dissimilarity(&routes[i], &routes[j]));
            }
        }
        let mean = if pairwise.is_empty() {
            0.0
        } else {
            pairwise.iter().sum::<f64>() / pairwise.len() as f64
        };
        out.push(SpreadRow { setting: name, routes, pairwise, mean_dissimilarity: mean });
    }
    Ok((world, out))
}

pub fn run_exp2(cfg: &Config, seeds: &[u64], out: &Path, render_all: bool) -> Result<()> {
    write_manifest("exp2", cfg, seeds, out)?;
    let mut tsv = TsvWriter::new(&["seed", "setting", "pair", "dissimilarity"]);
    let mut summary = TsvWriter::new(&["seed", "setting", "mean_dissimilarity"]);
    for (n, &seed) in seeds.iter().enumerate() {
        let (world, rows) = spread_rows(cfg, seed)?;
        for row in &rows {
            let mut k = 0;
            for i in 0..row.routes.len() {
                for j in i + 1..row.routes.len() {
                    tsv.row(&[
                        seed.to_string(),
                        row.setting.to_string(),
                        format!("{i}-{j}"),
                        fmt_f64(row.pairwise[k]),
                    ]);
                    k += 1;
                }
            }
            summary.row(&[
                seed.to_string(),
                row.setting.to_string(),
                fmt_f64(row.mean_dissimilarity),
            ]);
            if render_all || n == 0 {
                let mut scene = SvgScene::new(world.truth.bounds());
                scene.add_costmap(&world.truth);
                scene.add_roadmap(&world.roadmap);
                for (i, r) in row.routes.iter().enumerate() {
                    scene.add_route(r, ROUTE_COLORS[i % ROUTE_COLORS.len()], 4.0);
                }
                scene.add_endpoint_markers(cfg.start(), cfg.goal());
                write_file(
                    &out.join(format!("exp2_seed{seed}_{}.svg", row.setting)),
                    &scene.finish(),
                )?;
            }
        }
    }
    write_file(&out.join("metrics.tsv"), &tsv.finish())?;
    write_file(&out.join("summary.tsv"), &summary.finish())
}

/// One seed of the third study: a full survey mission, then three routes
/// priced on the true map. `post` is what the team would commit to after
/// surveying, `apriori` what planning on prior data alone would give,
/// and `best` the optimum under full knowledge.
pub struct MissionComparison {
    pub seed: u64,
    pub mission: MissionResult,
    pub apriori: Route,
    pub best: Route,
    pub cost_best: f64,
    pub cost_apriori: f64,
    pub cost_post: f64,
    pub surveyed_fraction: f64,
}

pub fn mission_comparison(cfg: &Config, seed: u64) -> Result<(World, MissionComparison)> {
    let mut c = cfg.clone();
    c.seed = seed;
    let world = build_world(&c, seed)?;
    let mission_cfg = c.mission()?;
    let mission =
        run_mission_with(&mission_cfg, &world.truth, world.estimate.clone(), &world.roadmap)?;
    let gains = c.gains()?;

    let mut prior = world.roadmap.clone();
    score_all(&mut prior, &world.estimate, &gains)?;
    let apriori = shortest_path(&prior)?;

    let mut known = world.roadmap.clone();
    score_all(&mut known, &world.truth, &gains)?;
    let best = shortest_path(&known)?;

    let cost_best = best.rescore(&world.truth, &gains)?.total;
    let cost_apriori = apriori.rescore(&world.truth, &gains)?.total;
    let cost_post = mission.final_route.rescore(&world.truth, &gains)?.total;
    let surveyed_fraction = mission.estimate.surveyed_fraction();
    Ok((
        world,
        MissionComparison {
            seed,
            mission,
            apriori,
            best,
            cost_best,
            cost_apriori,
            cost_post,
            surveyed_fraction,
        },
    ))
}

pub fn run_exp3(cfg: &Config, seeds: &[u64], out: &Path, render_all: bool) -> Result<()> {
    write_manifest("exp3", cfg, seeds, out)?;
    let mut tsv = TsvWriter::new(&[
        "seed",
        "cost_best",
        "cost_apriori",
        "cost_post",
        "improved",
        "surveyed_fraction",
        "ticks",
        "surveys",
    ]);
    for (n, &seed) in seeds.iter().enumerate() {
        let (world, cmp) = mission_comparison(cfg, seed)?;
        let improved = cmp.cost_post <= cmp.cost_apriori;
        tsv.row(&[
            seed.to_string(),
            fmt_f64(cmp.cost_best),
            fmt_f64(cmp.cost_apriori),
            fmt_f64(cmp.cost_post),
            if improved { "1" } else { "0" }.to_string(),
            fmt_f64(cmp.surveyed_fraction),
            cmp.mission.ticks.to_string(),
            cmp.mission.surveys.to_string(),
        ]);
        if render_all || n == 0 {
            let mut scene = SvgScene::new(world.truth.bounds());
            scene.add_costmap(&world.truth);
            scene.add_roadmap(&world.roadmap);
            for v in &cmp.mission.vehicles {
                scene.add_trace(&v.trace, "#6b7280");
            }
            scene.add_route(&cmp.best, ROUTE_COLORS[2], 3.0);
            scene.add_route(&cmp.apriori, ROUTE_COLORS[1], 4.0);
            scene.add_route(&cmp.mission.final_route, ROUTE_COLORS[0], 4.0);
            scene.add_endpoint_markers(cfg.start(), cfg.goal());
            write_file(&out.join(format!("exp3_seed{seed}.svg")), &scene.finish())?;
        }
    }
    write_file(&out.join("metrics.tsv"), &tsv.finish())
}

pub fn write_manifest(experiment: &str, cfg: &Config, seeds: &[u64], out: &Path) -> Result<()> {
    let m = Manifest {
        experiment: experiment.to_string(),
        seeds: seeds.to_vec(),
        config: cfg.clone(),
    };
    write_file(&out.join("manifest.txt"), &manifest_to_string(&m))
}
