//! The one-shot subcommands (`plan`, `mission`) and the shared dispatch
//! that the command line and manifest re-runs both go through.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Result};
use wayscout_core::planner::{plan_diverse_routes, route_dissimilarity};
use wayscout_core::scoring::score_all;

use crate::config::Config;
use crate::experiments::{
    build_world, mission_comparison, run_exp1, run_exp2, run_exp3, write_manifest,
};
use crate::formats::{
    costmap_to_string, fmt_f64, manifest_from_string, read_to_string, roadmap_to_string,
    route_to_string, write_file, TsvWriter,
};
use crate::svg::{SvgScene, ROUTE_COLORS};

/// Plans a diverse route team on the a-priori estimate and writes the
/// full picture: map, scored roadmap, routes, separations, and overlay.
pub fn run_plan(cfg: &Config, out: &Path) -> Result<()> {
    let seed = cfg.seed;
    write_manifest("plan", cfg, &[seed], out)?;
    let world = build_world(cfg, seed)?;
    let mut scored = world.roadmap.clone();
    score_all(&mut scored, &world.estimate, &cfg.gains()?)?;
    let routes = plan_diverse_routes(&scored, cfg.n_routes, &cfg.penalty()?)?;

    write_file(&out.join("estimate_map.txt"), &costmap_to_string(&world.estimate))?;
    write_file(&out.join("roadmap.txt"), &roadmap_to_string(&scored))?;
    let mut tsv = TsvWriter::new(&["route", "length", "base_cost", "cost"]);
    for (i, r) in routes.iter().enumerate() {
        write_file(&out.join(format!("route_{i}.txt")), &route_to_string(r))?;
        tsv.row(&[
            i.to_string(),
            fmt_f64(r.total_length),
            fmt_f64(r.total_base_cost),
            fmt_f64(r.total_cost),
        ]);
    }
    write_file(&out.join("metrics.tsv"), &tsv.finish())?;
    let mut pairs = TsvWriter::new(&["route_a", "route_b", "dissimilarity"]);
    for i in 0..routes.len() {
        for j in i + 1..routes.len() {
            pairs.row(&[
                i.to_string(),
                j.to_string(),
                fmt_f64(route_dissimilarity(&routes[i], &routes[j])),
            ]);
        }
    }
    write_file(&out.join("dissimilarity.tsv"), &pairs.finish())?;

    let mut scene = SvgScene::new(world.estimate.bounds());
    scene.add_costmap(&world.estimate);
    scene.add_roadmap(&scored);
    for (i, r) in routes.iter().enumerate() {
        scene.add_route(r, ROUTE_COLORS[i % ROUTE_COLORS.len()], 4.0);
    }
    scene.add_endpoint_markers(cfg.start(), cfg.goal());
    write_file(&out.join("plan.svg"), &scene.finish())
}

/// Runs one full survey mission and writes its artifacts: both maps,
/// the final scored roadmap, the selected route, traces, the replan
/// history, and an overlay against planning on prior data alone.
pub fn run_mission_cmd(cfg: &Config, out: &Path) -> Result<()> {
    let seed = cfg.seed;
    write_manifest("mission", cfg, &[seed], out)?;
    let (world, cmp) = mission_comparison(cfg, seed)?;
    let mission = &cmp.mission;

    write_file(&out.join("truth_map.txt"), &costmap_to_string(&world.truth))?;
    write_file(&out.join("estimate_map.txt"), &costmap_to_string(&mission.estimate))?;
    write_file(&out.join("roadmap.txt"), &roadmap_to_string(&mission.roadmap))?;
    write_file(&out.join("final_route.txt"), &route_to_string(&mission.final_route))?;
    write_file(&out.join("apriori_route.txt"), &route_to_string(&cmp.apriori))?;

    let mut trace = TsvWriter::new(&["vehicle", "tick", "x", "y"]);
    for v in &mission.vehicles {
        for (t, p) in v.trace.iter().enumerate() {
            trace.row(&[v.id.to_string(), t.to_string(), fmt_f64(p.x), fmt_f64(p.y)]);
        }
    }
    write_file(&out.join("trace.tsv"), &trace.finish())?;

    let mut replans = TsvWriter::new(&["tick", "vehicle", "cost", "base_cost", "length", "vertices"]);
    for rec in &mission.replans {
        for (id, route) in &rec.routes {
            let mut verts = String::new();
            for (k, v) in route.vertices.iter().enumerate() {
                if k > 0 {
                    verts.push(' ');
                }
                let _ = write!(verts, "{v}");
            }
            replans.row(&[
                rec.tick.to_string(),
                id.to_string(),
                fmt_f64(route.total_cost),
                fmt_f64(route.total_base_cost),
                fmt_f64(route.total_length),
                verts,
            ]);
        }
    }
    write_file(&out.join("replans.tsv"), &replans.finish())?;

    let mut tsv = TsvWriter::new(&[
        "ticks",
        "surveys",
        "surveyed_fraction",
        "cost_best",
        "cost_apriori",
        "cost_post",
    ]);
    tsv.row(&[
        mission.ticks.to_string(),
        mission.surveys.to_string(),
        fmt_f64(cmp.surveyed_fraction),
        fmt_f64(cmp.cost_best),
        fmt_f64(cmp.cost_apriori),
        fmt_f64(cmp.cost_post),
    ]);
    write_file(&out.join("metrics.tsv"), &tsv.finish())?;

    let mut scene = SvgScene::new(world.truth.bounds());
    scene.add_costmap(&world.truth);
    scene.add_roadmap(&world.roadmap);
    for v in &mission.vehicles {
        scene.add_trace(&v.trace, "#6b7280");
    }
    scene.add_route(&cmp.best, ROUTE_COLORS[2], 3.0);
    scene.add_route(&cmp.apriori, ROUTE_COLORS[1], 4.0);
    scene.add_route(&mission.final_route, ROUTE_COLORS[0], 4.0);
    scene.add_endpoint_markers(cfg.start(), cfg.goal());
    write_file(&out.join("mission.svg"), &scene.finish())
}

/// Runs any subcommand by name on a prepared config and seed list.
pub fn dispatch(
    experiment: &str,
    cfg: &Config,
    seeds: &[u64],
    out: &Path,
    render_all: bool,
) -> Result<()> {
    if seeds.is_empty() {
        bail!("need at least one seed");
    }
    match experiment {
        "plan" => {
            let mut c = cfg.clone();
            c.seed = seeds[0];
            run_plan(&c, out)
        }
        "mission" => {
            let mut c = cfg.clone();
            c.seed = seeds[0];
            run_mission_cmd(&c, out)
        }
        "exp1" => run_exp1(cfg, seeds, out, render_all),
        "exp2" => run_exp2(cfg, seeds, out, render_all),
        "exp3" => run_exp3(cfg, seeds, out, render_all),
        other => bail!("unknown experiment `{other}`"),
    }
}

/// Re-runs a finished run from its manifest; metrics files come out
/// byte-identical to the original's.
pub fn rerun_manifest(manifest_path: &Path, out: &Path, render_all: bool) -> Result<()> {
    let m = manifest_from_string(&read_to_string(manifest_path)?)?;
    dispatch(&m.experiment, &m.config, &m.seeds, out, render_all)
}
