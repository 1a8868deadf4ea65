//! Result export: a JSON run report embedding the resolved scenario and
//! seed, CSV footstep and CoM-trajectory tables, a layered SVG rendering and
//! a reloadable copy of the resolved scenario.

pub mod svg;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::planner::{Diagnostics, Solution, SolveOutcome};
use crate::scenario::Scenario;
use crate::solution::{sample_com_trajectory, ComSample, SolutionRecord};
pub use svg::Layers;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("json serialization failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("scenario serialization failed: {0}")]
    Scenario(#[from] crate::scenario::ScenarioError),
}

/// Which output files to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub json: bool,
    pub csv: bool,
    pub svg: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Self {
            json: true,
            csv: true,
            svg: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExportOptions {
    pub out_dir: PathBuf,
    pub formats: Formats,
    pub layers: Layers,
    /// CoM sampling interval in seconds.
    pub dt: f64,
}

impl Default for ExportOptions {
    fn default() -> Self {
        Self {
            out_dir: PathBuf::from("out"),
            formats: Formats::default(),
            layers: Layers::default(),
            dt: 0.05,
        }
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    schema_version: u32,
    name: &'a str,
    seed: u64,
    result: &'static str,
    diagnostics: &'a Diagnostics,
    rewire_attempted: usize,
    rewire_accepted: usize,
    rewire_duration_log: &'a [f64],
    pre_rewire: Option<SolutionRecord>,
    post_rewire: Option<SolutionRecord>,
    scenario: crate::scenario::ScenarioFile,
}

/// Serialize the run report (stable bytes for a given run).
pub fn run_report_json(
    scenario: &Scenario,
    outcome: &SolveOutcome<f64>,
) -> Result<String, ExportError> {
    let report = RunReport {
        schema_version: crate::scenario::SCHEMA_VERSION,
        name: &scenario.name,
        seed: scenario.problem.config.rng_seed,
        result: if outcome.diagnostics.solved {
            "solved"
        } else {
            "no_solution"
        },
        diagnostics: &outcome.diagnostics,
        rewire_attempted: outcome.rewire_stats.attempted,
        rewire_accepted: outcome.rewire_stats.accepted,
        rewire_duration_log: &outcome.rewire_stats.duration_log,
        pre_rewire: outcome
            .pre_rewire
            .as_ref()
            .map(SolutionRecord::from_solution),
        post_rewire: outcome
            .post_rewire
            .as_ref()
            .map(SolutionRecord::from_solution),
        scenario: scenario.to_file(),
    };
    Ok(serde_json::to_string_pretty(&report)?)
}

fn footsteps_csv(record: &SolutionRecord) -> String {
    let mut out = String::from("index,side,foot_x,foot_y,t_switch,t_apex,arrival_time,x,y,theta\n");
    for row in &record.rows {
        let side = match row.side {
            crate::solution::StanceSide::Left => "left",
            crate::solution::StanceSide::Right => "right",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.index,
            side,
            row.foot_x,
            row.foot_y,
            row.t_switch,
            row.t_apex,
            row.arrival_time,
            row.config[0],
            row.config[1],
            row.config[2]
        );
    }
    out
}

fn com_csv(samples: &[ComSample]) -> String {
    let mut out = String::from("t,x,y\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{}", s.t, s.x, s.y);
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<PathBuf, ExportError> {
    std::fs::write(path, contents).map_err(|source| ExportError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path.to_path_buf())
}

/// The solution the tabular outputs describe: the rewired one when present.
fn final_solution(outcome: &SolveOutcome<f64>) -> Option<&Solution<f64>> {
    outcome.post_rewire.as_ref().or(outcome.pre_rewire.as_ref())
}

/// Write the selected formats into `out_dir` (created if absent). Returns
/// the paths written. Failure diagnostics still produce a JSON report.
pub fn export_run(
    scenario: &Scenario,
    outcome: &SolveOutcome<f64>,
    options: &ExportOptions,
) -> Result<Vec<PathBuf>, ExportError> {
    std::fs::create_dir_all(&options.out_dir).map_err(|source| ExportError::Io {
        path: options.out_dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    let lipm = &scenario.problem.lipm;
    let com = final_solution(outcome).map(|sol| sample_com_trajectory(sol, lipm, options.dt));

    if options.formats.json {
        let json = run_report_json(scenario, outcome)?;
        written.push(write_file(&options.out_dir.join("run.json"), &json)?);
        written.push(write_file(
            &options.out_dir.join("resolved.scenario"),
            &scenario.to_toml_string()?,
        )?);
    }

    if options.formats.csv {
        if let Some(solution) = final_solution(outcome) {
            let record = SolutionRecord::from_solution(solution);
            written.push(write_file(
                &options.out_dir.join("footsteps.csv"),
                &footsteps_csv(&record),
            )?);
            written.push(write_file(
                &options.out_dir.join("com_trajectory.csv"),
                &com_csv(com.as_deref().unwrap_or(&[])),
            )?);
        }
    }

    if options.formats.svg {
        let record = final_solution(outcome).map(SolutionRecord::from_solution);
        let scene = svg::SvgScene {
            bounds: scenario.problem.bounds,
            world: &scenario.problem.world,
            tree: Some(&outcome.tree),
            pre_rewire: outcome.pre_rewire.as_ref(),
            post_rewire: outcome.post_rewire.as_ref(),
            footsteps: record.as_ref(),
            com: com.as_deref(),
            start: scenario.problem.start.position(),
            goal: scenario.problem.goal.position(),
        };
        written.push(write_file(
            &options.out_dir.join("plan.svg"),
            &svg::render(&scene, &options.layers),
        )?);
    }

    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::{solve, RewireStats, Tree};

    const CORRIDOR: &str = r#"
schema_version = 1
name = "corridor-test"

[bounds]
min = [-1.0, -1.0, 0.0]
max = [3.0, 1.0, 6.283185307179586]

[start]
config = [0.0, 0.0, 0.0]

[goal]
config = [1.7, 0.0, 0.0]

[initial_step]
foot = [0.0, -0.078]
apex_pos = [0.0, 0.0]
apex_vel = [0.3, 0.0]

[kinematics]
r_min = 0.5
s_max = 0.17
speed = 0.3

[planner]
goal_bias = 0.9
max_iterations = 500
seed = 1
rewire_iterations = 100
"#;

    #[test]
    fn export_writes_all_formats() {
        let scenario = Scenario::from_toml_str(CORRIDOR).unwrap();
        let outcome = solve(&scenario.problem);
        assert!(outcome.diagnostics.solved);
        let dir = std::env::temp_dir().join("stride-export-test");
        let _ = std::fs::remove_dir_all(&dir);
        let options = ExportOptions {
            out_dir: dir.clone(),
            ..ExportOptions::default()
        };
        let written = export_run(&scenario, &outcome, &options).unwrap();
        assert_eq!(written.len(), 5);
        for path in &written {
            assert!(path.exists());
        }

        let json = std::fs::read_to_string(dir.join("run.json")).unwrap();
        assert!(json.contains("\"result\": \"solved\""));
        assert!(json.contains("\"seed\": 1"));

        // CSV row counts: header + one row per step record.
        let steps = outcome.post_rewire.as_ref().unwrap().steps.len();
        let footsteps = std::fs::read_to_string(dir.join("footsteps.csv")).unwrap();
        assert_eq!(footsteps.lines().count(), 1 + steps);
        let com = std::fs::read_to_string(dir.join("com_trajectory.csv")).unwrap();
        let duration = outcome.post_rewire.as_ref().unwrap().duration();
        let expected = 1 + (duration / options.dt).floor() as usize + (steps - 1);
        assert_eq!(com.lines().count(), 1 + expected);

        // The resolved scenario reloads to an identical problem.
        let reloaded = Scenario::load(dir.join("resolved.scenario")).unwrap();
        assert_eq!(reloaded.problem, scenario.problem);

        let svg = std::fs::read_to_string(dir.join("plan.svg")).unwrap();
        assert!(svg.contains("id=\"tree\""));
        assert!(svg.contains("id=\"rewired\""));
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn failure_reports_no_solution() {
        let scenario = Scenario::from_toml_str(CORRIDOR).unwrap();
        let outcome = SolveOutcome {
            tree: Tree::new(scenario.problem.start, scenario.problem.seed_loco),
            diagnostics: Diagnostics {
                iterations: 7,
                tree_size: 1,
                solved: false,
                ..Diagnostics::default()
            },
            pre_rewire: None,
            post_rewire: None,
            rewire_stats: RewireStats::default(),
        };
        let json = run_report_json(&scenario, &outcome).unwrap();
        assert!(json.contains("\"result\": \"no_solution\""));
        assert!(json.contains("\"tree_size\": 1"));
        assert!(json.contains("\"pre_rewire\": null"));
    }

    #[test]
    fn json_bytes_are_reproducible() {
        let scenario = Scenario::from_toml_str(CORRIDOR).unwrap();
        let a = run_report_json(&scenario, &solve(&scenario.problem)).unwrap();
        let b = run_report_json(&scenario, &solve(&scenario.problem)).unwrap();
        assert_eq!(a, b);
    }
}
