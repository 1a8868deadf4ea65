//! Materialized solution output: per-step footstep/timing rows with stance
//! side labels, and CoM trajectory sampling from the closed-form dynamics.

use serde::{Deserialize, Serialize};

use crate::geom::Vec2;
use crate::lipm::{state_at, LipmParams, PendulumState};
use crate::planner::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StanceSide {
    Left,
    Right,
}

impl StanceSide {
    fn other(self) -> Self {
        match self {
            StanceSide::Left => StanceSide::Right,
            StanceSide::Right => StanceSide::Left,
        }
    }
}

/// One row per step: global footstep, stance side, timings, arrival time and
/// the node configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub index: usize,
    pub foot_x: f64,
    pub foot_y: f64,
    pub side: StanceSide,
    pub t_switch: f64,
    pub t_apex: f64,
    pub arrival_time: f64,
    pub config: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub rows: Vec<StepRow>,
    pub step_count: usize,
    pub duration: f64,
}

impl SolutionRecord {
    /// Stance sides alternate starting from the side implied by the sign of
    /// the seed step's lateral placement (negative = right).
    pub fn from_solution(solution: &Solution<f64>) -> Self {
        let footsteps = solution.global_footsteps();
        let mut side = if solution.steps[0].loco.foot.y < 0.0 {
            StanceSide::Right
        } else {
            StanceSide::Left
        };
        let mut rows = Vec::with_capacity(solution.steps.len());
        for (i, (step, foot)) in solution.steps.iter().zip(&footsteps).enumerate() {
            rows.push(StepRow {
                index: i,
                foot_x: foot.x,
                foot_y: foot.y,
                side,
                t_switch: step.loco.t_switch,
                t_apex: step.loco.t_apex,
                arrival_time: step.arrival_time,
                config: [step.config.x, step.config.y, step.config.theta],
            });
            side = side.other();
        }
        Self {
            rows,
            step_count: solution.step_count(),
            duration: solution.duration(),
        }
    }
}

/// One CoM trajectory sample in the global frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// Global CoM position and velocity at walking time `t` along the solution.
///
/// Within each step the CoM follows the stance orbit of the previous foot
/// until the switch instant and the new foot's orbit after it, evaluated in
/// the frame the step was solved in and transformed out.
pub fn com_state_at(
    solution: &Solution<f64>,
    lipm: &LipmParams<f64>,
    t: f64,
) -> (Vec2<f64>, Vec2<f64>) {
    let steps = &solution.steps;
    debug_assert!(!steps.is_empty());

    // Times at or before the start map to the root apex state.
    let start_time = steps[0].arrival_time;
    if steps.len() == 1 || t <= start_time {
        let frame = solution.frame_of_step(0);
        let stance = steps[0].loco.stance();
        return (
            frame.to_global(stance.apex_pos),
            frame.vec_to_global(stance.apex_vel),
        );
    }

    // Locate the step whose interval (arrival_{i-1}, arrival_i] holds t;
    // times beyond the end clamp to the final apex.
    let mut index = steps.len() - 1;
    for (i, step) in steps.iter().enumerate().skip(1) {
        if t <= step.arrival_time {
            index = i;
            break;
        }
    }
    let tau = (t - steps[index - 1].arrival_time)
        .max(0.0)
        .min(steps[index].loco.step_duration());

    let frame = solution.frame_of_step(index);
    let prev_stance = solution.stance_in_own_frame(index - 1);
    let loco = &steps[index].loco;
    let omega = lipm
        .omega(prev_stance.foot.x)
        .expect("solved steps have valid pendulum height");

    let sag0 = PendulumState::new(prev_stance.apex_pos.x, prev_stance.apex_vel.x);
    let lat0 = PendulumState::new(prev_stance.apex_pos.y, prev_stance.apex_vel.y);
    let (sag, lat) = if tau <= loco.t_switch {
        (
            state_at(&sag0, prev_stance.foot.x, omega, tau),
            state_at(&lat0, prev_stance.foot.y, omega, tau),
        )
    } else {
        let sag_switch = state_at(&sag0, prev_stance.foot.x, omega, loco.t_switch);
        let lat_switch = state_at(&lat0, prev_stance.foot.y, omega, loco.t_switch);
        let after = tau - loco.t_switch;
        (
            state_at(&sag_switch, loco.foot.x, omega, after),
            state_at(&lat_switch, loco.foot.y, omega, after),
        )
    };
    (
        frame.to_global(Vec2::new(sag.pos, lat.pos)),
        frame.vec_to_global(Vec2::new(sag.vel, lat.vel)),
    )
}

/// Sample the CoM trajectory: the start instant, every multiple of `dt`
/// within the walking duration, and every step boundary, in time order.
/// Row count is therefore `1 + floor(duration / dt) + step_count`.
pub fn sample_com_trajectory(
    solution: &Solution<f64>,
    lipm: &LipmParams<f64>,
    dt: f64,
) -> Vec<ComSample> {
    debug_assert!(dt > 0.0);
    let start = solution.steps[0].arrival_time;
    let duration = solution.duration();
    let mut times: Vec<f64> = vec![start];
    let grid = (duration / dt).floor() as usize;
    times.extend((1..=grid).map(|j| start + j as f64 * dt));
    times.extend(solution.steps[1..].iter().map(|s| s.arrival_time));
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());

    times
        .into_iter()
        .map(|t| {
            let (pos, _) = com_state_at(solution, lipm, t);
            ComSample {
                t,
                x: pos.x,
                y: pos.y,
            }
        })
        .collect()
}
