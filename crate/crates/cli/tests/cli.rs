//! End-to-end checks of the `stride` binary: exit codes, format/layer
//! selection and the output-directory override.

use std::path::PathBuf;
use std::process::Command;

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stride-cli-{tag}"));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn stride() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stride"))
}

const BLOCKED: &str = r#"
schema_version = 1
name = "blocked"

[bounds]
min = [-1.0, -1.0, 0.0]
max = [3.0, 1.0, 6.283185307179586]

[start]
config = [0.0, 0.0, 0.0]

[goal]
config = [2.0, 0.0, 0.0]

[initial_step]
foot = [0.0, -0.078]
apex_pos = [0.0, 0.0]
apex_vel = [0.3, 0.0]

[kinematics]
r_min = 0.5
s_max = 0.17
speed = 0.3

[planner]
max_iterations = 50
seed = 4

[[obstacle]]
kind = "static"
center = [2.0, 0.0]
half_extents = [0.4, 0.4]
"#;

#[test]
fn solved_run_exits_zero_and_writes_outputs() {
    let out = temp_dir("solved");
    let status = stride()
        .args(["plan"])
        .arg(scenario_path("corridor.scenario"))
        .args(["--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for file in [
        "run.json",
        "resolved.scenario",
        "footsteps.csv",
        "com_trajectory.csv",
        "plan.svg",
    ] {
        assert!(out.join(file).exists(), "{file} missing");
    }
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn no_solution_exits_two_with_json_diagnostics() {
    let out = temp_dir("blocked");
    let scenario = out.join("blocked.scenario");
    std::fs::create_dir_all(&out).unwrap();
    std::fs::write(&scenario, BLOCKED).unwrap();
    let status = stride()
        .args(["plan"])
        .arg(&scenario)
        .args(["--out"])
        .arg(&out)
        .args(["--formats", "json"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let json = std::fs::read_to_string(out.join("run.json")).unwrap();
    assert!(json.contains("\"result\": \"no_solution\""));
    assert!(!out.join("footsteps.csv").exists());
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn input_errors_exit_one() {
    let status = stride()
        .args(["plan", "/definitely/not/a/file.scenario"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // Invalid override values are input errors too.
    let status = stride()
        .args(["plan"])
        .arg(scenario_path("corridor.scenario"))
        .args(["--goal-bias", "1.5"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    let status = stride()
        .args(["plan"])
        .arg(scenario_path("corridor.scenario"))
        .args(["--formats", "yaml"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn env_var_sets_the_default_output_directory() {
    let out = temp_dir("envdir");
    let status = stride()
        .args(["plan"])
        .arg(scenario_path("corridor.scenario"))
        .env("STRIDE_OUT_DIR", &out)
        .args(["--formats", "json"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("run.json").exists());
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn seed_override_changes_the_report_and_layers_filter_the_svg() {
    let out_a = temp_dir("seed-a");
    let out_b = temp_dir("seed-b");
    for (dir, seed) in [(&out_a, "1"), (&out_b, "99")] {
        let status = stride()
            .args(["plan"])
            .arg(scenario_path("corridor.scenario"))
            .args(["--seed", seed, "--layers", "walls,solution", "--out"])
            .arg(dir)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = std::fs::read_to_string(out_a.join("run.json")).unwrap();
    let b = std::fs::read_to_string(out_b.join("run.json")).unwrap();
    assert!(a.contains("\"seed\": 1"));
    assert!(b.contains("\"seed\": 99"));

    let svg = std::fs::read_to_string(out_a.join("plan.svg")).unwrap();
    assert!(svg.contains("id=\"solution\""));
    assert!(!svg.contains("id=\"tree\""));
    let _ = std::fs::remove_dir_all(&out_a);
    let _ = std::fs::remove_dir_all(&out_b);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let out_a = temp_dir("det-a");
    let out_b = temp_dir("det-b");
    for dir in [&out_a, &out_b] {
        let status = stride()
            .args(["plan"])
            .arg(scenario_path("crossing.scenario"))
            .args(["--formats", "json,csv", "--out"])
            .arg(dir)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    for file in ["run.json", "footsteps.csv", "com_trajectory.csv"] {
        let a = std::fs::read(out_a.join(file)).unwrap();
        let b = std::fs::read(out_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    let _ = std::fs::remove_dir_all(&out_a);
    let _ = std::fs::remove_dir_all(&out_b);
}
