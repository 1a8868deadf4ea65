//! Solution smoothing: splice direct Dubins connections between random
//! solution node pairs when the alternative is collision-free and not
//! slower, recomputing all downstream locomotion parameters.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Solution, SolutionStep};
use crate::dubins;
use crate::geom::{Config, KinematicParams, Pose2};
use crate::lipm::LipmParams;
use crate::propagation::propagate_branch;
use crate::scalar::Real;
use crate::world::World;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewireStats<T> {
    pub attempted: usize,
    pub accepted: usize,
    /// Total solution duration after each accepted splice (non-increasing).
    pub duration_log: Vec<T>,
}

impl<T> Default for RewireStats<T> {
    fn default() -> Self {
        Self {
            attempted: 0,
            accepted: 0,
            duration_log: Vec::new(),
        }
    }
}

/// Repeatedly shortcut the solution. Each iteration picks two distinct nodes,
/// connects them with a fresh Dubins branch, and splices it in when the
/// branch is collision-free through time, not slower than the segment it
/// replaces, and the recomputed downstream tail stays feasible and free.
/// Failed splices are skipped; accepted ones never increase total duration.
pub fn rewire<T: Real>(
    solution: &Solution<T>,
    world: &World<T>,
    kinematics: &KinematicParams<T>,
    lipm: &LipmParams<T>,
    iterations: usize,
    rng: &mut impl Rng,
) -> (Solution<T>, RewireStats<T>) {
    let mut sol = solution.clone();
    let mut stats = RewireStats::default();

    for _ in 0..iterations {
        let n = sol.steps.len();
        if n < 3 {
            break;
        }
        stats.attempted += 1;

        let first = rng.gen_range(0..n);
        let second = {
            let raw = rng.gen_range(0..n - 1);
            if raw >= first {
                raw + 1
            } else {
                raw
            }
        };
        let (lo, hi) = if first < second {
            (first, second)
        } else {
            (second, first)
        };

        if let Some(spliced) = try_splice(&sol, lo, hi, world, kinematics, lipm) {
            stats.accepted += 1;
            stats.duration_log.push(spliced.duration());
            sol = spliced;
        }
    }
    (sol, stats)
}

fn try_splice<T: Real>(
    sol: &Solution<T>,
    lo: usize,
    hi: usize,
    world: &World<T>,
    kinematics: &KinematicParams<T>,
    lipm: &LipmParams<T>,
) -> Option<Solution<T>> {
    let path = dubins::shortest_path(
        &sol.steps[lo].config,
        &sol.steps[hi].config,
        kinematics.r_min,
    )
    .ok()?;
    if path.is_degenerate() {
        return None;
    }
    let alt_configs = dubins::intermediate_nodes(&path, kinematics.s_max);
    if alt_configs.is_empty() {
        return None;
    }

    let alt = propagate_branch(
        &sol.steps[lo].config,
        &sol.stance_in_own_frame(lo),
        &alt_configs,
        lipm,
        kinematics.speed,
        sol.steps[lo].arrival_time,
    );
    if !alt.is_complete() || alt.is_empty() {
        return None;
    }
    let replaced_duration = sol.steps[hi].arrival_time - sol.steps[lo].arrival_time;
    if alt.duration > replaced_duration {
        return None;
    }
    if !world.branch_is_free(&alt) {
        return None;
    }

    // Recompute everything downstream of the splice point: the locomotion
    // state at the joined node changed, so the whole tail shifts in time.
    let last = alt.len() - 1;
    let alt_end_config = alt.configs[last];
    let alt_end_parent = if last == 0 {
        Pose2::from_config(&sol.steps[lo].config)
    } else {
        Pose2::from_config(&alt.configs[last - 1])
    };
    let tail_seed = alt.params[last]
        .stance()
        .to_global(&alt_end_parent)
        .to_local(&Pose2::from_config(&alt_end_config));
    let tail_configs: Vec<Config<T>> = sol.steps[hi + 1..].iter().map(|s| s.config).collect();
    let tail = propagate_branch(
        &alt_end_config,
        &tail_seed,
        &tail_configs,
        lipm,
        kinematics.speed,
        alt.arrival_times[last],
    );
    if !tail.is_complete() {
        return None;
    }
    if !world.branch_is_free(&tail) {
        return None;
    }

    let new_total = tail
        .arrival_times
        .last()
        .copied()
        .unwrap_or(alt.arrival_times[last])
        - sol.steps[0].arrival_time;
    if new_total > sol.duration() {
        return None;
    }

    let mut steps = Vec::with_capacity(lo + 1 + alt.len() + tail.len());
    steps.extend_from_slice(&sol.steps[..=lo]);
    for i in 0..alt.len() {
        steps.push(SolutionStep {
            config: alt.configs[i],
            loco: alt.params[i],
            arrival_time: alt.arrival_times[i],
        });
    }
    for i in 0..tail.len() {
        steps.push(SolutionStep {
            config: tail.configs[i],
            loco: tail.params[i],
            arrival_time: tail.arrival_times[i],
        });
    }
    Some(Solution { steps })
}
