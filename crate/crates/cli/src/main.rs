//! Batch driver: load a scenario, run the planner and the rewiring pass,
//! export the results.
//!
//! Exit codes: 0 = solved, 2 = no solution found, 1 = input error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use stride_core::export::{export_run, ExportOptions, Formats, Layers};
use stride_core::planner::solve;
use stride_core::scenario::Scenario;

#[derive(Parser)]
#[command(
    name = "stride",
    version,
    about = "Time-optimal bipedal walking route planner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a walking route for a scenario file and export the results.
    Plan(PlanArgs),
}

#[derive(Args)]
struct PlanArgs {
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Override the scenario's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of rewiring iterations.
    #[arg(long = "rewire-iters")]
    rewire_iters: Option<usize>,
    /// Override the goal-bias probability (must be in (0, 1)).
    #[arg(long = "goal-bias")]
    goal_bias: Option<f64>,
    /// Override the number of closest candidate nodes per extension.
    #[arg(long)]
    k: Option<usize>,
    /// Override the iteration budget.
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Output directory (default: $STRIDE_OUT_DIR, then ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of: json,csv,svg (default: all).
    #[arg(long, value_delimiter = ',')]
    formats: Option<Vec<String>>,
    /// CoM trajectory sampling interval in seconds.
    #[arg(long)]
    dt: Option<f64>,
    /// Comma-separated SVG layers: walls,obstacles,tree,solution,rewired,footsteps,com.
    #[arg(long, value_delimiter = ',')]
    layers: Option<Vec<String>>,
    /// Evaluate candidate branches in parallel.
    #[arg(long)]
    parallel: bool,
}

fn parse_formats(names: &[String]) -> Result<Formats> {
    let mut formats = Formats {
        json: false,
        csv: false,
        svg: false,
    };
    for name in names {
        match name.trim() {
            "json" => formats.json = true,
            "csv" => formats.csv = true,
            "svg" => formats.svg = true,
            other => bail!("unknown format {other:?} (expected json, csv or svg)"),
        }
    }
    Ok(formats)
}

fn parse_layers(names: &[String]) -> Result<Layers> {
    let mut layers = Layers {
        walls: false,
        obstacles: false,
        tree: false,
        solution: false,
        rewired: false,
        footsteps: false,
        com: false,
    };
    for name in names {
        match name.trim() {
            "walls" => layers.walls = true,
            "obstacles" => layers.obstacles = true,
            "tree" => layers.tree = true,
            "solution" => layers.solution = true,
            "rewired" => layers.rewired = true,
            "footsteps" => layers.footsteps = true,
            "com" => layers.com = true,
            other => bail!("unknown layer {other:?}"),
        }
    }
    Ok(layers)
}

fn out_dir(cli: Option<PathBuf>) -> PathBuf {
    cli.or_else(|| std::env::var_os("STRIDE_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn run_plan(args: PlanArgs) -> Result<bool> {
    let mut scenario = Scenario::load(&args.scenario)
        .with_context(|| format!("loading scenario {}", args.scenario.display()))?;

    let cfg = &mut scenario.problem.config;
    if let Some(seed) = args.seed {
        cfg.rng_seed = seed;
    }
    if let Some(iters) = args.rewire_iters {
        cfg.rewire_iterations = iters;
    }
    if let Some(bias) = args.goal_bias {
        if !(bias > 0.0 && bias < 1.0) {
            bail!("--goal-bias must be in (0, 1), got {bias}");
        }
        cfg.goal_bias = bias;
    }
    if let Some(k) = args.k {
        if k == 0 {
            bail!("--k must be at least 1");
        }
        cfg.k_nearest = k;
    }
    if let Some(iters) = args.max_iters {
        cfg.max_iterations = iters;
    }
    if args.parallel {
        cfg.parallel = true;
    }

    let mut options = ExportOptions {
        out_dir: out_dir(args.out),
        ..ExportOptions::default()
    };
    if let Some(formats) = &args.formats {
        options.formats = parse_formats(formats)?;
    }
    if let Some(layers) = &args.layers {
        options.layers = parse_layers(layers)?;
    }
    if let Some(dt) = args.dt {
        if dt.is_nan() || dt <= 0.0 {
            bail!("--dt must be positive, got {dt}");
        }
        options.dt = dt;
    }

    let p = &scenario.problem;
    eprintln!(
        "scenario {:?}: start ({:.3}, {:.3}, {:.3}), goal ({:.3}, {:.3}, {:.3})",
        scenario.name, p.start.x, p.start.y, p.start.theta, p.goal.x, p.goal.y, p.goal.theta
    );
    eprintln!(
        "resolved: seed={} k={} goal_bias={} max_iters={} rewire_iters={} safety_radius={} \
         r_min={} s_max={} speed={} g={} slope={} height={} parallel={}",
        p.config.rng_seed,
        p.config.k_nearest,
        p.config.goal_bias,
        p.config.max_iterations,
        p.config.rewire_iterations,
        p.world.safety_radius,
        p.kinematics.r_min,
        p.kinematics.s_max,
        p.kinematics.speed,
        p.lipm.gravity,
        p.lipm.slope,
        p.lipm.height,
        p.config.parallel,
    );

    let outcome = solve(&scenario.problem);
    let written =
        export_run(&scenario, &outcome, &options).map_err(|e| anyhow!("export failed: {e}"))?;

    let d = &outcome.diagnostics;
    if d.solved {
        let pre = outcome
            .pre_rewire
            .as_ref()
            .expect("solved run has a solution");
        let post = outcome
            .post_rewire
            .as_ref()
            .expect("solved run was rewired");
        eprintln!(
            "solved: {} steps, {:.3} s walk; rewired to {} steps, {:.3} s \
             ({} of {} splices accepted)",
            pre.step_count(),
            pre.duration(),
            post.step_count(),
            post.duration(),
            outcome.rewire_stats.accepted,
            outcome.rewire_stats.attempted,
        );
    } else {
        eprintln!(
            "no solution found after {} iterations (tree size {})",
            d.iterations, d.tree_size
        );
    }
    eprintln!(
        "tree: {} nodes, {} extensions, {} dynamic truncations, {} collision prunes",
        d.tree_size, d.extensions, d.dynamic_truncations, d.collision_prunes
    );
    for path in &written {
        eprintln!("wrote {}", path.display());
    }
    Ok(d.solved)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan(args) => run_plan(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
