//! Scenario files: a single versioned, human-readable TOML document holding
//! bounds, start/goal, the seed locomotion state, kinematic and pendulum
//! parameters, planner knobs and the obstacle set.
//!
//! Loading fills every default and validates every invariant, naming the
//! offending field; saving writes the fully resolved document back out, so
//! load(save(load(f))) is the identity on resolved scenarios.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Bounds, Config, KinematicParams, Vec2};
use crate::lipm::{LipmParams, LocomotionParams};
use crate::planner::{PlanProblem, PlannerConfig};
use crate::world::{Motion, Obstacle, World};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("serialize error: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("unsupported schema_version {found} (expected {SCHEMA_VERSION})")]
    SchemaVersion { found: u32 },
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("invalid `{field}`: {problem}")]
    Invalid { field: String, problem: String },
}

fn invalid(field: impl Into<String>, problem: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.into(),
        problem: problem.into(),
    }
}

/// A fully resolved scenario: every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub problem: PlanProblem<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct ScenarioFile {
    schema_version: u32,
    #[serde(default)]
    name: Option<String>,
    bounds: BoundsSection,
    start: ConfigSection,
    goal: ConfigSection,
    initial_step: InitialStepSection,
    kinematics: KinematicsSection,
    #[serde(default)]
    lipm: LipmSection,
    #[serde(default)]
    planner: PlannerSection,
    #[serde(default)]
    world: WorldSection,
    #[serde(default, rename = "obstacle")]
    obstacles: Vec<ObstacleSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BoundsSection {
    min: [f64; 3],
    max: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ConfigSection {
    config: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InitialStepSection {
    foot: [f64; 2],
    apex_pos: [f64; 2],
    apex_vel: [f64; 2],
    #[serde(default)]
    t_switch: f64,
    #[serde(default)]
    t_apex: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct KinematicsSection {
    r_min: f64,
    s_max: f64,
    speed: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LipmSection {
    #[serde(default = "default_gravity")]
    gravity: f64,
    #[serde(default)]
    slope: f64,
    #[serde(default = "default_height")]
    height: f64,
}

impl Default for LipmSection {
    fn default() -> Self {
        Self {
            gravity: default_gravity(),
            slope: 0.0,
            height: default_height(),
        }
    }
}

fn default_gravity() -> f64 {
    9.81
}

fn default_height() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PlannerSection {
    #[serde(default = "default_k_nearest")]
    k_nearest: usize,
    #[serde(default = "default_goal_bias")]
    goal_bias: f64,
    #[serde(default = "default_goal_tol_pos")]
    goal_tolerance_pos: f64,
    #[serde(default = "default_goal_tol_heading")]
    goal_tolerance_heading: f64,
    #[serde(default = "default_max_iterations")]
    max_iterations: usize,
    #[serde(default = "default_rewire_iterations")]
    rewire_iterations: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    parallel: bool,
}

impl Default for PlannerSection {
    fn default() -> Self {
        Self {
            k_nearest: default_k_nearest(),
            goal_bias: default_goal_bias(),
            goal_tolerance_pos: default_goal_tol_pos(),
            goal_tolerance_heading: default_goal_tol_heading(),
            max_iterations: default_max_iterations(),
            rewire_iterations: default_rewire_iterations(),
            seed: 0,
            parallel: false,
        }
    }
}

fn default_k_nearest() -> usize {
    20
}
fn default_goal_bias() -> f64 {
    0.1
}
fn default_goal_tol_pos() -> f64 {
    0.05
}
fn default_goal_tol_heading() -> f64 {
    0.1
}
fn default_max_iterations() -> usize {
    200_000
}
fn default_rewire_iterations() -> usize {
    5_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct WorldSection {
    #[serde(default = "default_safety_radius")]
    safety_radius: f64,
}

impl Default for WorldSection {
    fn default() -> Self {
        Self {
            safety_radius: default_safety_radius(),
        }
    }
}

fn default_safety_radius() -> f64 {
    0.3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ObstacleSection {
    kind: String,
    half_extents: [f64; 2],
    #[serde(default)]
    orientation: f64,
    // static / circular motion center, linear start point
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    velocity: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ping_pong: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phase: Option<f64>,
}

fn vec2(a: [f64; 2]) -> Vec2<f64> {
    Vec2::new(a[0], a[1])
}

fn require_finite(field: &str, values: &[f64]) -> Result<(), ScenarioError> {
    if values.iter().any(|v| !v.is_finite()) {
        Err(invalid(field, "must be finite"))
    } else {
        Ok(())
    }
}

fn obstacle_from_section(
    index: usize,
    s: &ObstacleSection,
) -> Result<Obstacle<f64>, ScenarioError> {
    let field = |name: &str| format!("obstacle[{index}].{name}");
    require_finite(&field("half_extents"), &s.half_extents)?;
    require_finite(&field("orientation"), &[s.orientation])?;
    let half_extents = vec2(s.half_extents);
    if half_extents.x <= 0.0 || half_extents.y <= 0.0 {
        return Err(invalid(field("half_extents"), "must be strictly positive"));
    }
    match s.kind.as_str() {
        "static" => {
            let center = s
                .center
                .ok_or_else(|| invalid(field("center"), "required for kind = \"static\""))?;
            require_finite(&field("center"), &center)?;
            Ok(Obstacle::static_rect(
                vec2(center),
                half_extents,
                s.orientation,
            ))
        }
        "linear" => {
            let start = s
                .start
                .ok_or_else(|| invalid(field("start"), "required for kind = \"linear\""))?;
            let velocity = s
                .velocity
                .ok_or_else(|| invalid(field("velocity"), "required for kind = \"linear\""))?;
            require_finite(&field("start"), &start)?;
            require_finite(&field("velocity"), &velocity)?;
            let ping_pong = match s.ping_pong {
                None => None,
                Some([lo, hi]) => {
                    require_finite(&field("ping_pong"), &[lo, hi])?;
                    if !(lo <= 0.0 && 0.0 <= hi && lo < hi) {
                        return Err(invalid(
                            field("ping_pong"),
                            "must satisfy lo <= 0 <= hi with lo < hi",
                        ));
                    }
                    Some((lo, hi))
                }
            };
            Ok(Obstacle::linear(
                vec2(start),
                vec2(velocity),
                ping_pong,
                half_extents,
                s.orientation,
            ))
        }
        "circular" => {
            let center = s
                .center
                .ok_or_else(|| invalid(field("center"), "required for kind = \"circular\""))?;
            let radius = s
                .radius
                .ok_or_else(|| invalid(field("radius"), "required for kind = \"circular\""))?;
            let rate = s
                .rate
                .ok_or_else(|| invalid(field("rate"), "required for kind = \"circular\""))?;
            let phase = s.phase.unwrap_or(0.0);
            require_finite(&field("center"), &center)?;
            require_finite(&field("radius/rate/phase"), &[radius, rate, phase])?;
            if radius < 0.0 {
                return Err(invalid(field("radius"), "must be non-negative"));
            }
            Ok(Obstacle::circular(
                vec2(center),
                radius,
                rate,
                phase,
                half_extents,
                s.orientation,
            ))
        }
        other => Err(invalid(
            field("kind"),
            format!("unknown kind {other:?} (expected static, linear or circular)"),
        )),
    }
}

fn obstacle_to_section(obs: &Obstacle<f64>) -> ObstacleSection {
    let mut section = ObstacleSection {
        kind: String::new(),
        half_extents: [obs.shape.half_extents.x, obs.shape.half_extents.y],
        orientation: obs.shape.orientation,
        center: None,
        start: None,
        velocity: None,
        ping_pong: None,
        radius: None,
        rate: None,
        phase: None,
    };
    match obs.motion {
        Motion::Static => {
            section.kind = "static".into();
            section.center = Some([obs.shape.center.x, obs.shape.center.y]);
        }
        Motion::Linear {
            velocity,
            ping_pong,
        } => {
            section.kind = "linear".into();
            section.start = Some([obs.shape.center.x, obs.shape.center.y]);
            section.velocity = Some([velocity.x, velocity.y]);
            section.ping_pong = ping_pong.map(|(lo, hi)| [lo, hi]);
        }
        Motion::Circular {
            center,
            radius,
            rate,
            phase,
        } => {
            section.kind = "circular".into();
            section.center = Some([center.x, center.y]);
            section.radius = Some(radius);
            section.rate = Some(rate);
            section.phase = Some(phase);
        }
    }
    section
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = toml::from_str(text)?;
        Self::resolve(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut scenario = Self::from_toml_str(&text)?;
        if scenario.name.is_empty() {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                scenario.name = stem.to_string();
            }
        }
        Ok(scenario)
    }

    fn resolve(file: ScenarioFile) -> Result<Self, ScenarioError> {
        if file.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::SchemaVersion {
                found: file.schema_version,
            });
        }
        require_finite("bounds.min", &file.bounds.min)?;
        require_finite("bounds.max", &file.bounds.max)?;
        let bounds = Bounds::new(file.bounds.min, file.bounds.max);

        require_finite("start.config", &file.start.config)?;
        require_finite("goal.config", &file.goal.config)?;
        let start = Config::new(
            file.start.config[0],
            file.start.config[1],
            file.start.config[2],
        );
        let goal = Config::new(
            file.goal.config[0],
            file.goal.config[1],
            file.goal.config[2],
        );

        let kin = KinematicParams::new(
            file.kinematics.r_min,
            file.kinematics.s_max,
            file.kinematics.speed,
        )
        .map_err(|e| invalid("kinematics", e.to_string()))?;

        require_finite(
            "lipm",
            &[file.lipm.gravity, file.lipm.slope, file.lipm.height],
        )?;
        if file.lipm.gravity <= 0.0 {
            return Err(invalid("lipm.gravity", "must be strictly positive"));
        }
        let lipm = LipmParams::new(file.lipm.gravity, file.lipm.slope, file.lipm.height);

        let seed_step = &file.initial_step;
        require_finite("initial_step.foot", &seed_step.foot)?;
        require_finite("initial_step.apex_pos", &seed_step.apex_pos)?;
        require_finite("initial_step.apex_vel", &seed_step.apex_vel)?;
        require_finite(
            "initial_step timings",
            &[seed_step.t_switch, seed_step.t_apex],
        )?;
        if (seed_step.apex_pos[0] - seed_step.foot[0]).abs() > 1e-12 {
            return Err(invalid(
                "initial_step.apex_pos",
                "sagittal apex must sit over the foot (apex_pos[0] == foot[0])",
            ));
        }
        if seed_step.t_switch < 0.0 || seed_step.t_apex < 0.0 {
            return Err(invalid("initial_step", "timings must be non-negative"));
        }
        let seed_loco = LocomotionParams {
            foot: vec2(seed_step.foot),
            apex_pos: vec2(seed_step.apex_pos),
            apex_vel: vec2(seed_step.apex_vel),
            t_switch: seed_step.t_switch,
            t_apex: seed_step.t_apex,
        };
        lipm.omega(seed_loco.foot.x)
            .map_err(|e| invalid("lipm", e.to_string()))?;

        let p = &file.planner;
        if !(p.goal_bias > 0.0 && p.goal_bias < 1.0) {
            return Err(invalid("planner.goal_bias", "must be in (0, 1)"));
        }
        if p.k_nearest == 0 {
            return Err(invalid("planner.k_nearest", "must be at least 1"));
        }
        require_finite(
            "planner.goal_tolerance",
            &[p.goal_tolerance_pos, p.goal_tolerance_heading],
        )?;
        if p.goal_tolerance_pos <= 0.0 || p.goal_tolerance_heading <= 0.0 {
            return Err(invalid("planner.goal_tolerance", "must be positive"));
        }
        let planner = PlannerConfig {
            k_nearest: p.k_nearest,
            goal_bias: p.goal_bias,
            goal_tol_pos: p.goal_tolerance_pos,
            goal_tol_heading: p.goal_tolerance_heading,
            max_iterations: p.max_iterations,
            rewire_iterations: p.rewire_iterations,
            rng_seed: p.seed,
            parallel: p.parallel,
        };

        let obstacles = file
            .obstacles
            .iter()
            .enumerate()
            .map(|(i, s)| obstacle_from_section(i, s))
            .collect::<Result<Vec<_>, _>>()?;
        let world = World::new(obstacles, bounds, file.world.safety_radius)
            .map_err(|e| invalid("world", e.to_string()))?;

        if !bounds.contains_position(start.position()) {
            return Err(invalid("start.config", "must lie inside bounds"));
        }
        if !world.is_free(start.position(), 0.0) {
            return Err(invalid("start.config", "must be collision-free at t = 0"));
        }
        if !world.is_free(seed_loco.foot, 0.0) {
            return Err(invalid(
                "initial_step.foot",
                "must be collision-free at t = 0",
            ));
        }

        Ok(Scenario {
            name: file.name.unwrap_or_default(),
            problem: PlanProblem {
                start,
                goal,
                seed_loco,
                bounds,
                kinematics: kin,
                lipm,
                world,
                config: planner,
            },
        })
    }

    /// Serialize the fully resolved scenario (all defaults explicit).
    pub fn to_toml_string(&self) -> Result<String, ScenarioError> {
        Ok(toml::to_string_pretty(&self.to_file())?)
    }

    /// The serializable echo of the resolved scenario.
    pub(crate) fn to_file(&self) -> ScenarioFile {
        let p = &self.problem;
        ScenarioFile {
            schema_version: SCHEMA_VERSION,
            name: if self.name.is_empty() {
                None
            } else {
                Some(self.name.clone())
            },
            bounds: BoundsSection {
                min: p.bounds.min,
                max: p.bounds.max,
            },
            start: ConfigSection {
                config: [p.start.x, p.start.y, p.start.theta],
            },
            goal: ConfigSection {
                config: [p.goal.x, p.goal.y, p.goal.theta],
            },
            initial_step: InitialStepSection {
                foot: [p.seed_loco.foot.x, p.seed_loco.foot.y],
                apex_pos: [p.seed_loco.apex_pos.x, p.seed_loco.apex_pos.y],
                apex_vel: [p.seed_loco.apex_vel.x, p.seed_loco.apex_vel.y],
                t_switch: p.seed_loco.t_switch,
                t_apex: p.seed_loco.t_apex,
            },
            kinematics: KinematicsSection {
                r_min: p.kinematics.r_min,
                s_max: p.kinematics.s_max,
                speed: p.kinematics.speed,
            },
            lipm: LipmSection {
                gravity: p.lipm.gravity,
                slope: p.lipm.slope,
                height: p.lipm.height,
            },
            planner: PlannerSection {
                k_nearest: p.config.k_nearest,
                goal_bias: p.config.goal_bias,
                goal_tolerance_pos: p.config.goal_tol_pos,
                goal_tolerance_heading: p.config.goal_tol_heading,
                max_iterations: p.config.max_iterations,
                rewire_iterations: p.config.rewire_iterations,
                seed: p.config.rng_seed,
                parallel: p.config.parallel,
            },
            world: WorldSection {
                safety_radius: p.world.safety_radius,
            },
            obstacles: p.world.obstacles.iter().map(obstacle_to_section).collect(),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
        let text = self.to_toml_string()?;
        std::fs::write(path.as_ref(), text).map_err(|source| ScenarioError::Io {
            path: path.as_ref().display().to_string(),
            source,
        })
    }
}
