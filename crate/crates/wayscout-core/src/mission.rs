//! Closed-loop survey mission: a vehicle team repeatedly plans diverse
//! routes on the shared estimate, advances along them, surveys the
//! subcells it crosses, folds the observations back into the estimate,
//! and replans. Ends when every vehicle reaches the goal.

use crate::costmap::{TerrainParams, TwoValueCostmap, UpdateMode};
use crate::error::{Error, Result};
use crate::geom::{Point, Rect};
use crate::planner::{penalize_costs, shortest_path, split_base_costs, PenaltyParams, Route};
use crate::rng::{derive_seed, STREAM_ESTIMATE, STREAM_GENERATORS, STREAM_TRUTH};
use crate::roadmap::{build_voronoi_roadmap, place_generators, Roadmap, COINCIDENT_EPS};
use crate::scoring::{score_all, score_edge, GainSet};
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Everything a mission run needs besides the terrain itself.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionConfig {
    pub bounds: Rect,
    pub start: Point,
    pub goal: Point,
    /// Voronoi generators for the roadmap.
    pub generator_count: usize,
    /// Connector edges per inserted query or vehicle position.
    pub k_connect: usize,
    pub gains: GainSet,
    pub penalty: PenaltyParams,
    pub n_vehicles: usize,
    /// Meters advanced per vehicle per tick.
    pub step_length: f64,
    /// Ticks between replans.
    pub replan_period: u32,
    /// Per-vehicle tick limit; exceeding it aborts the run.
    pub step_budget: u32,
    pub update_mode: UpdateMode,
    pub seed: u64,
}

impl MissionConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("start", self.start), ("goal", self.goal)] {
            if !p.is_finite() || !self.bounds.contains(p) {
                return Err(Error::Config(format!("{name} lies outside the bounds")));
            }
        }
        if self.start.distance(self.goal) <= COINCIDENT_EPS {
            return Err(Error::Config(format!("start and goal coincide")));
        }
        if self.generator_count < 4 {
            return Err(Error::Config(format!("generator_count must be at least 4")));
        }
        if self.k_connect == 0 {
            return Err(Error::Config(format!("k_connect must be positive")));
        }
        if self.n_vehicles == 0 {
            return Err(Error::Config(format!("n_vehicles must be positive")));
        }
        if !(self.step_length > 0.0) || !self.step_length.is_finite() {
            return Err(Error::Config(format!("step_length must be positive")));
        }
        if self.replan_period == 0 {
            return Err(Error::Config(format!("replan_period must be positive")));
        }
        if self.step_budget == 0 {
            return Err(Error::Config(format!("step_budget must be positive")));
        }
        Ok(())
    }
}

/// One vehicle's pose and bookkeeping during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleState {
    pub id: usize,
    pub position: Point,
    /// Current assigned route, replaced at every replan.
    pub route: Route,
    /// Index of the next waypoint to head for.
    pub progress: usize,
    /// Position after every tick, starting with the initial pose.
    pub trace: Vec<Point>,
    pub steps: u32,
    pub at_goal: bool,
}

/// The routes handed out at one replan, tagged with the tick they were
/// planned at and the vehicle each belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplanRecord {
    pub tick: u32,
    pub routes: Vec<(usize, Route)>,
}

/// Everything a finished mission leaves behind.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionResult {
    pub vehicles: Vec<VehicleState>,
    pub replans: Vec<ReplanRecord>,
    /// The shared estimate after all surveys.
    pub estimate: TwoValueCostmap,
    /// The planning roadmap, scored against the final estimate.
    pub roadmap: Roadmap,
    /// Unpenalized cheapest start-to-goal route on the final estimate.
    pub final_route: Route,
    pub ticks: u32,
    /// Survey reports folded into the estimate (first touch per subcell
    /// and tick; later passes over the same subcell re-report it).
    pub surveys: usize,
}

/// Builds the world from the config's seed (generators, true terrain,
/// a-priori estimate, roadmap) and runs the mission on it.
pub fn run_mission(cfg: &MissionConfig, terrain: &TerrainParams) -> Result<MissionResult> {
    cfg.validate()?;
    terrain.validate()?;
    let side = terrain.grid_dim as f64 * terrain.cell_size;
    let b = cfg.bounds;
    if b.min().x != 0.0 || b.min().y != 0.0 || (b.width() - side).abs() > 1e-9 || (b.height() - side).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "bounds must run from the origin to the terrain extent {side}"
        )));
    }
    let gens = place_generators(&b, cfg.generator_count, derive_seed(cfg.seed, STREAM_GENERATORS))?;
    let truth = terrain.generate(derive_seed(cfg.seed, STREAM_TRUTH))?;
    let estimate = terrain.generate(derive_seed(cfg.seed, STREAM_ESTIMATE))?;
    let rm = build_voronoi_roadmap(&gens, &b)?.insert_endpoints(cfg.start, cfg.goal, cfg.k_connect)?;
    run_mission_with(cfg, &truth, estimate, &rm)
}

/// Runs the mission loop on an explicit world: `truth` is surveyed,
/// `estimate` evolves, and `base` must already carry the start and goal
/// endpoints. Replans happen every `replan_period` ticks; vehicles are
/// planned, stepped, and surveyed in id order so runs reproduce exactly.
pub fn run_mission_with(
    cfg: &MissionConfig,
    truth: &TwoValueCostmap,
    mut estimate: TwoValueCostmap,
    base: &Roadmap,
) -> Result<MissionResult> {
    cfg.validate()?;
    if base.endpoints().is_none() {
        return Err(Error::Config(format!("roadmap has no endpoints attached")));
    }
    if truth.grid_dim() != estimate.grid_dim()
        || truth.subcell_count() != estimate.subcell_count()
        || truth.cell_size() != estimate.cell_size()
    {
        return Err(Error::Config(format!("truth and estimate shapes differ")));
    }
    let mut fleet: Vec<VehicleState> = (0..cfg.n_vehicles)
        .map(|id| VehicleState {
            id,
            position: cfg.start,
            route: Route::empty(),
            progress: 0,
            trace: vec![cfg.start],
            steps: 0,
            at_goal: false,
        })
        .collect();
    let mut replans: Vec<ReplanRecord> = Vec::new();
    let mut surveys = 0usize;
    let mut ticks = 0u32;
    'mission: loop {
        // Replan every active vehicle from its current pose, each
        // penalized against the routes already handed out this round.
        let mut scored = base.clone();
        score_all(&mut scored, &estimate, &cfg.gains)?;
        let mut committed: Vec<Route> = Vec::new();
        let mut round: Vec<(usize, Route)> = Vec::new();
        for v in fleet.iter_mut() {
            if v.at_goal {
                continue;
            }
            let route = assign_route(&scored, v.position, &committed, cfg, &estimate)?;
            v.route = route.clone();
            v.progress = 0;
            round.push((v.id, route.clone()));
            committed.push(route);
        }
        replans.push(ReplanRecord { tick: ticks, routes: round });
        for _ in 0..cfg.replan_period {
            for v in fleet.iter_mut() {
                if v.at_goal {
                    continue;
                }
                surveys += step_vehicle(v, cfg.step_length, &mut estimate, truth, cfg.update_mode)?;
                if v.steps > cfg.step_budget {
                    return Err(Error::StepBudget { vehicle: v.id, limit: cfg.step_budget });
                }
            }
            ticks += 1;
            if fleet.iter().all(|v| v.at_goal) {
                break 'mission;
            }
        }
    }
    let mut final_map = base.clone();
    score_all(&mut final_map, &estimate, &cfg.gains)?;
    let final_route = shortest_path(&final_map)?;
    Ok(MissionResult {
        vehicles: fleet,
        replans,
        estimate,
        roadmap: final_map,
        final_route,
        ticks,
        surveys,
    })
}

/// Plans one vehicle's route from its pose: re-home the scored roadmap's
/// start onto the pose (scoring any new connector edges), penalize
/// against the routes already committed this round, and take the
/// cheapest path. Base costs in the result are penalty-free.
pub fn assign_route(
    scored: &Roadmap,
    pose: Point,
    committed: &[Route],
    cfg: &MissionConfig,
    estimate: &TwoValueCostmap,
) -> Result<Route> {
    let (mut rm, added) = scored.insert_start(pose, cfg.k_connect)?;
    if let Some(nv) = added {
        for u in rm.neighbors(nv) {
            let s = score_edge(rm.vertex(nv), rm.vertex(u), estimate, &cfg.gains)?;
            rm.set_edge_cost(nv, u, s.cost)?;
        }
    }
    let penalized = penalize_costs(&rm, committed, &cfg.penalty)?;
    let route = shortest_path(&penalized)?;
    Ok(split_base_costs(route, &rm))
}

/// Advances one vehicle one tick along its route, surveying every
/// subcell the swept path crosses into the estimate. Motion follows the
/// route polyline, turning at waypoints, clamping at the final one (the
/// goal). Returns how many surveys were applied (each subcell at most
/// once per tick).
pub fn step_vehicle(
    v: &mut VehicleState,
    step_length: f64,
    estimate: &mut TwoValueCostmap,
    truth: &TwoValueCostmap,
    mode: UpdateMode,
) -> Result<usize> {
    let wps = v.route.waypoints();
    if wps.is_empty() {
        return Err(Error::Config(format!("vehicle {} has no route", v.id)));
    }
    let origin = v.position;
    let mut remaining = step_length;
    let mut segments: Vec<(Point, Point)> = Vec::new();
    while remaining > 0.0 && v.progress < wps.len() {
        let target = wps[v.progress];
        let d = v.position.distance(target);
        if d <= remaining {
            if d > 0.0 {
                segments.push((v.position, target));
            }
            v.position = target;
            v.progress += 1;
            remaining -= d;
        } else {
            let next = v.position.lerp(target, remaining / d);
            segments.push((v.position, next));
            v.position = next;
            remaining = 0.0;
        }
    }
    if v.progress >= wps.len() {
        v.at_goal = true;
    }
    v.trace.push(v.position);
    v.steps += 1;
    if segments.is_empty() {
        // Stationary tick (already at the last waypoint): survey in place.
        segments.push((origin, origin));
    }
    let mut seen: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    let mut applied = 0;
    for (a, b) in segments {
        for (cell, sub) in estimate.subcells_touched(a, b)? {
            if seen.insert((cell.row, cell.col, sub)) {
                let report = truth.survey_report(cell, sub)?;
                estimate.apply_survey(&report, mode)?;
                applied += 1;
            }
        }
    }
    Ok(applied)
}

/// The unpenalized cheapest route on a costmap, for judging what a team
/// would commit to after its survey effort.
pub fn select_final_route(base: &Roadmap, map: &TwoValueCostmap, gains: &GainSet) -> Result<Route> {
    let mut rm = base.clone();
    score_all(&mut rm, map, gains)?;
    shortest_path(&rm)
}
