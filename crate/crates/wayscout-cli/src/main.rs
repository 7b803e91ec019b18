use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use wayscout_cli::commands::{dispatch, rerun_manifest};
use wayscout_cli::config::{parse_override, parse_pairs, Config};
use wayscout_cli::experiments::{apply_preset, default_seed_count};
use wayscout_cli::formats::read_to_string;

/// Route planning over uncertain terrain for small vehicle teams:
/// diverse route planning, survey missions, and comparative studies.
#[derive(Parser)]
#[command(name = "wayscout", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a diverse route team on one generated world
    Plan(RunArgs),
    /// Run one closed-loop survey mission
    Mission(RunArgs),
    /// Compare gain profiles on a perfectly known map
    Exp1(RunArgs),
    /// Compare two diversity-penalty settings over a route team
    Exp2(RunArgs),
    /// Compare the post-mission route against prior-only planning
    Exp3(RunArgs),
    /// Re-run a finished run from its manifest
    Rerun(RerunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file of `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// First seed; experiments run their usual block of consecutive
    /// seeds from here unless --seeds gives an explicit list
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated seed list
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Override one config key, e.g. --set gamma=50 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Costmap update rule: incremental | exact
    #[arg(long, value_name = "MODE")]
    variance_mode: Option<String>,
    /// Penalty exponent denominator: standard | verbatim
    #[arg(long, value_name = "FORM")]
    penalty_exponent: Option<String>,
    /// Penalty distance units: normalized | raw
    #[arg(long, value_name = "UNITS")]
    penalty_distance: Option<String>,
    /// Render every seed instead of only the first
    #[arg(long)]
    render_all: bool,
}

#[derive(Args)]
struct RerunArgs {
    /// manifest.txt from a previous run
    manifest: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Render every seed instead of only the first
    #[arg(long)]
    render_all: bool,
}

fn build_config(experiment: &str, args: &RunArgs) -> Result<(Config, Vec<u64>)> {
    let mut cfg = Config::default();
    apply_preset(experiment, &mut cfg);
    if let Some(path) = &args.config {
        cfg.apply_pairs(&parse_pairs(&read_to_string(path)?)?)
            .with_context(|| format!("config file {}", path.display()))?;
    }
    for s in &args.set {
        let (k, v) = parse_override(s)?;
        cfg.apply(&k, &v)?;
    }
    if let Some(mode) = &args.variance_mode {
        cfg.apply("update_mode", mode)?;
    }
    if let Some(form) = &args.penalty_exponent {
        cfg.apply("penalty_exponent", form)?;
    }
    if let Some(units) = &args.penalty_distance {
        cfg.apply("penalty_distance", units)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let seeds = match &args.seeds {
        Some(list) => list.clone(),
        None => (0..default_seed_count(experiment) as u64).map(|i| cfg.seed + i).collect(),
    };
    Ok((cfg, seeds))
}

fn run(experiment: &str, args: &RunArgs) -> Result<()> {
    let (cfg, seeds) = build_config(experiment, args)?;
    dispatch(experiment, &cfg, &seeds, &args.out, args.render_all)?;
    println!("{experiment}: {} seed(s) -> {}", seeds.len(), args.out.display());
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Plan(args) => run("plan", &args),
        Command::Mission(args) => run("mission", &args),
        Command::Exp1(args) => run("exp1", &args),
        Command::Exp2(args) => run("exp2", &args),
        Command::Exp3(args) => run("exp3", &args),
        Command::Rerun(args) => {
            rerun_manifest(&args.manifest, &args.out, args.render_all)?;
            println!("rerun: {} -> {}", args.manifest.display(), args.out.display());
            Ok(())
        }
    }
}
