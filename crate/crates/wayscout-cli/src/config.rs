//! Run configuration: a flat `key = value` text format covering the
//! world, the planner, and the mission loop, with defaults matching the
//! standard desk-scale setup.

use anyhow::{anyhow, bail, Context, Result};
use wayscout_core::planner::ExponentForm;
use wayscout_core::{
    GainSet, MissionConfig, PenaltyParams, Point, Rect, TerrainParams, UpdateMode,
};

use crate::formats::fmt_f64;

/// Every tunable of a run. Serialized in a fixed order so emitted
/// configs and manifests are byte-stable.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Side length of the square map in meters.
    pub map_side: f64,
    /// Cells per map side; cell size is `map_side / grid_dim`.
    pub grid_dim: usize,
    pub subcell_count: usize,
    pub start_x: f64,
    pub start_y: f64,
    pub goal_x: f64,
    pub goal_y: f64,
    pub mean_low: f64,
    pub mean_high: f64,
    pub var_scale: f64,
    pub generator_count: usize,
    pub k_connect: usize,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub gamma: f64,
    pub sigma_sq: f64,
    pub n_routes: usize,
    pub n_vehicles: usize,
    pub step_length: f64,
    pub replan_period: u32,
    pub step_budget: u32,
    pub seed: u64,
    pub update_mode: UpdateMode,
    pub penalty_exponent: ExponentForm,
    /// Normalized: penalty distances divided by the map side before the
    /// exponent. Raw: distances stay in meters.
    pub penalty_distance_normalized: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            map_side: 2000.0,
            grid_dim: 20,
            subcell_count: 9,
            start_x: 200.0,
            start_y: 1800.0,
            goal_x: 1700.0,
            goal_y: 600.0,
            mean_low: 2.0,
            mean_high: 8.0,
            var_scale: 1.0,
            generator_count: 100,
            k_connect: 3,
            k1: 0.6,
            k2: 0.3,
            k3: 0.1,
            gamma: 100.0,
            sigma_sq: 0.0003,
            n_routes: 3,
            n_vehicles: 3,
            step_length: 25.0,
            replan_period: 20,
            step_budget: 10_000,
            seed: 42,
            update_mode: UpdateMode::Incremental,
            penalty_exponent: ExponentForm::Standard,
            penalty_distance_normalized: true,
        }
    }
}

impl Config {
    /// Parses `key = value` lines over the defaults. Blank lines and
    /// `#` comments are skipped; unknown keys are an error.
    pub fn parse(text: &str) -> Result<Config> {
        let mut cfg = Config::default();
        cfg.apply_pairs(&parse_pairs(text)?)?;
        Ok(cfg)
    }

    /// Applies `key = value` overrides in order.
    pub fn apply_pairs(&mut self, pairs: &[(String, String)]) -> Result<()> {
        for (key, value) in pairs {
            self.apply(key, value)
                .with_context(|| format!("bad config entry `{key} = {value}`"))?;
        }
        Ok(())
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "map_side" => self.map_side = value.parse()?,
            "grid_dim" => self.grid_dim = value.parse()?,
            "subcell_count" => self.subcell_count = value.parse()?,
            "start_x" => self.start_x = value.parse()?,
            "start_y" => self.start_y = value.parse()?,
            "goal_x" => self.goal_x = value.parse()?,
            "goal_y" => self.goal_y = value.parse()?,
            "mean_low" => self.mean_low = value.parse()?,
            "mean_high" => self.mean_high = value.parse()?,
            "var_scale" => self.var_scale = value.parse()?,
            "generator_count" => self.generator_count = value.parse()?,
            "k_connect" => self.k_connect = value.parse()?,
            "k1" => self.k1 = value.parse()?,
            "k2" => self.k2 = value.parse()?,
            "k3" => self.k3 = value.parse()?,
            "gamma" => self.gamma = value.parse()?,
            "sigma_sq" => self.sigma_sq = value.parse()?,
            "n_routes" => self.n_routes = value.parse()?,
            "n_vehicles" => self.n_vehicles = value.parse()?,
            "step_length" => self.step_length = value.parse()?,
            "replan_period" => self.replan_period = value.parse()?,
            "step_budget" => self.step_budget = value.parse()?,
            "seed" => self.seed = value.parse()?,
            "update_mode" => {
                self.update_mode = match value {
                    "incremental" => UpdateMode::Incremental,
                    "exact" => UpdateMode::Exact,
                    other => bail!("update_mode must be incremental or exact, got `{other}`"),
                }
            }
            "penalty_exponent" => {
                self.penalty_exponent = match value {
                    "standard" => ExponentForm::Standard,
                    "verbatim" => ExponentForm::Verbatim,
                    other => bail!("penalty_exponent must be standard or verbatim, got `{other}`"),
                }
            }
            "penalty_distance" => {
                self.penalty_distance_normalized = match value {
                    "normalized" => true,
                    "raw" => false,
                    other => bail!("penalty_distance must be normalized or raw, got `{other}`"),
                }
            }
            other => bail!("unknown config key `{other}`"),
        }
        Ok(())
    }

    /// The configuration as text, in a fixed key order; `parse` of the
    /// result reproduces the value exactly.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        kv("map_side", fmt_f64(self.map_side));
        kv("grid_dim", self.grid_dim.to_string());
        kv("subcell_count", self.subcell_count.to_string());
        kv("start_x", fmt_f64(self.start_x));
        kv("start_y", fmt_f64(self.start_y));
        kv("goal_x", fmt_f64(self.goal_x));
        kv("goal_y", fmt_f64(self.goal_y));
        kv("mean_low", fmt_f64(self.mean_low));
        kv("mean_high", fmt_f64(self.mean_high));
        kv("var_scale", fmt_f64(self.var_scale));
        kv("generator_count", self.generator_count.to_string());
        kv("k_connect", self.k_connect.to_string());
        kv("k1", fmt_f64(self.k1));
        kv("k2", fmt_f64(self.k2));
        kv("k3", fmt_f64(self.k3));
        kv("gamma", fmt_f64(self.gamma));
        kv("sigma_sq", fmt_f64(self.sigma_sq));
        kv("n_routes", self.n_routes.to_string());
        kv("n_vehicles", self.n_vehicles.to_string());
        kv("step_length", fmt_f64(self.step_length));
        kv("replan_period", self.replan_period.to_string());
        kv("step_budget", self.step_budget.to_string());
        kv("seed", self.seed.to_string());
        kv(
            "update_mode",
            match self.update_mode {
                UpdateMode::Incremental => "incremental",
                UpdateMode::Exact => "exact",
            }
            .to_string(),
        );
        kv(
            "penalty_exponent",
            match self.penalty_exponent {
                ExponentForm::Standard => "standard",
                ExponentForm::Verbatim => "verbatim",
            }
            .to_string(),
        );
        kv(
            "penalty_distance",
            if self.penalty_distance_normalized { "normalized" } else { "raw" }.to_string(),
        );
        s
    }

    pub fn bounds(&self) -> Result<Rect> {
        Ok(Rect::new(0.0, 0.0, self.map_side, self.map_side)?)
    }

    pub fn start(&self) -> Point {
        Point::new(self.start_x, self.start_y)
    }

    pub fn goal(&self) -> Point {
        Point::new(self.goal_x, self.goal_y)
    }

    pub fn terrain(&self) -> Result<TerrainParams> {
        if self.grid_dim == 0 {
            bail!("grid_dim must be positive");
        }
        let t = TerrainParams {
            grid_dim: self.grid_dim,
            subcell_count: self.subcell_count,
            cell_size: self.map_side / self.grid_dim as f64,
            mean_low: self.mean_low,
            mean_high: self.mean_high,
            var_scale: self.var_scale,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn gains(&self) -> Result<GainSet> {
        Ok(GainSet::new(self.k1, self.k2, self.k3)?)
    }

    pub fn penalty(&self) -> Result<PenaltyParams> {
        let normalizer = if self.penalty_distance_normalized { self.map_side } else { 1.0 };
        Ok(PenaltyParams::new(self.gamma, self.sigma_sq, normalizer)?
            .with_exponent(self.penalty_exponent))
    }

    pub fn mission(&self) -> Result<MissionConfig> {
        let cfg = MissionConfig {
            bounds: self.bounds()?,
            start: self.start(),
            goal: self.goal(),
            generator_count: self.generator_count,
            k_connect: self.k_connect,
            gains: self.gains()?,
            penalty: self.penalty()?,
            n_vehicles: self.n_vehicles,
            step_length: self.step_length,
            replan_period: self.replan_period,
            step_budget: self.step_budget,
            update_mode: self.update_mode,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Splits `key = value` lines, skipping blanks and `#` comments.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{line}`", lineno + 1))?;
        out.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Parses a `KEY=VALUE` command-line override.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| anyhow!("override `{s}` must look like key=value"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}
