//! Conversion of a geometric node sequence into the mirror sequence of
//! locomotion parameters by recursive application of the phase-space step
//! solver, with per-node arrival times and total branch duration.

use serde::{Deserialize, Serialize};

use crate::geom::{angle_diff, Config, Pose2, Vec2};
use crate::lipm::{psp_step, LipmParams, LocomotionParams, StanceState, StepInput};
use crate::scalar::Real;

/// Why a branch ends before its last target configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// The step solver found no dynamically consistent realization.
    Infeasible,
    /// A node collided at its arrival time (set by the world pruning pass).
    Collision,
}

/// A propagated branch: configurations with their mirror locomotion
/// parameters, global footsteps, cumulative arrival times and total duration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch<T> {
    pub configs: Vec<Config<T>>,
    /// Locomotion parameters per node, each expressed in its parent's frame.
    pub params: Vec<LocomotionParams<T>>,
    /// Foot placements in the global frame, aligned with `configs`.
    pub footsteps: Vec<Vec2<T>>,
    /// Arrival time per node, measured from the tree root.
    pub arrival_times: Vec<T>,
    /// Sum of step durations over the retained nodes.
    pub duration: T,
    /// Arrival time of the node this branch grows from.
    pub start_time: T,
    pub stopped_by: Option<StopReason>,
}

impl<T: Real> Branch<T> {
    pub fn empty(start_time: T) -> Self {
        Self {
            configs: Vec::new(),
            params: Vec::new(),
            footsteps: Vec::new(),
            arrival_times: Vec::new(),
            duration: T::zero(),
            start_time,
            stopped_by: None,
        }
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    /// A branch that reached its full target sequence.
    pub fn is_complete(&self) -> bool {
        self.stopped_by.is_none()
    }

    /// Drop every node from `index` on, restoring the duration to the exact
    /// prefix fold, and record why.
    pub fn truncate(&mut self, index: usize, reason: StopReason) {
        if index >= self.len() {
            return;
        }
        self.configs.truncate(index);
        self.params.truncate(index);
        self.footsteps.truncate(index);
        self.arrival_times.truncate(index);
        let mut duration = T::zero();
        for p in &self.params {
            duration += p.step_duration();
        }
        self.duration = duration;
        self.stopped_by = Some(reason);
    }
}

/// Input triple for the step connecting `parent` to `child`: the child's
/// sagittal coordinate in the parent's frame (its lateral coordinate is
/// discarded) and the apex velocity from the heading change at speed `V`.
pub fn compute_psp_input<T: Real>(parent: &Config<T>, child: &Config<T>, speed: T) -> StepInput<T> {
    let frame = Pose2::from_config(parent);
    let local = frame.to_local(child.position());
    let dtheta = angle_diff(child.theta, parent.theta);
    StepInput {
        foot_x: local.x,
        apex_vel_x: speed * dtheta.cos(),
        apex_vel_y: speed * dtheta.sin(),
    }
}

/// Propagate the pendulum dynamics along `configs`, which continue from the
/// tree node at `root`. `seed` is that node's stance state re-expressed in
/// its own local frame, and `t_seed` its arrival time.
///
/// A step-solver failure at node `j` truncates the branch at `j - 1` and
/// flags it [`StopReason::Infeasible`]; the usable prefix is kept.
pub fn propagate_branch<T: Real>(
    root: &Config<T>,
    seed: &StanceState<T>,
    configs: &[Config<T>],
    lipm: &LipmParams<T>,
    speed: T,
    t_seed: T,
) -> Branch<T> {
    let mut branch = Branch::empty(t_seed);
    branch.configs.reserve(configs.len());
    branch.params.reserve(configs.len());

    let mut parent = *root;
    let mut parent_pose = Pose2::from_config(&parent);
    let mut stance = *seed;

    for child in configs {
        let input = compute_psp_input(&parent, child, speed);
        let output = match psp_step(&stance, &input, lipm) {
            Ok(out) => out,
            Err(_) => {
                branch.stopped_by = Some(StopReason::Infeasible);
                break;
            }
        };
        let loco = LocomotionParams::from_step(&input, &output);
        branch.duration += loco.step_duration();
        branch.configs.push(*child);
        branch.footsteps.push(parent_pose.to_global(loco.foot));
        branch.arrival_times.push(t_seed + branch.duration);
        branch.params.push(loco);

        // Re-express the new step's stance in the child's own frame for the
        // next iteration.
        let child_pose = Pose2::from_config(child);
        stance = loco.stance().to_global(&parent_pose).to_local(&child_pose);
        parent = *child;
        parent_pose = child_pose;
    }
    branch
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lipm::PendulumState;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn straight_seed() -> StanceState<f64> {
        StanceState {
            foot: Vec2::new(0.0, -0.078),
            apex_pos: Vec2::new(0.0, 0.0),
            apex_vel: Vec2::new(0.3, 0.0),
        }
    }

    /// Closed-form duration of the symmetric straight step of length `s` at
    /// apex speed `v`.
    fn symmetric_step_period(s: f64, v: f64, omega: f64) -> f64 {
        let x_sw = 0.5 * s;
        let v_sw = (v * v + omega * omega * x_sw * x_sw).sqrt();
        let t_sw = ((x_sw + v_sw / omega) * omega / v).ln() / omega;
        2.0 * t_sw
    }

    #[test]
    fn psp_input_examples() {
        let input = compute_psp_input(
            &Config::new(0.0, 0.0, 0.0),
            &Config::new(0.17, 0.0, 0.0),
            0.3,
        );
        assert_abs_diff_eq!(input.foot_x, 0.17, epsilon = 1e-15);
        assert_abs_diff_eq!(input.apex_vel_x, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(input.apex_vel_y, 0.0, epsilon = 1e-15);

        let input = compute_psp_input(
            &Config::new(0.0, 0.0, 0.0),
            &Config::new(0.168, 0.017, 0.2),
            0.3,
        );
        assert_abs_diff_eq!(input.foot_x, 0.168, epsilon = 1e-15);
        assert_abs_diff_eq!(input.apex_vel_x, 0.3 * 0.2f64.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(input.apex_vel_x, 0.29402, epsilon = 1e-5);
        assert_abs_diff_eq!(input.apex_vel_y, 0.3 * 0.2f64.sin(), epsilon = 1e-12);
        assert_abs_diff_eq!(input.apex_vel_y, 0.05960, epsilon = 1e-5);

        // Rotated frame: a step straight ahead of a pi/2 heading.
        let input = compute_psp_input(
            &Config::new(1.0, 1.0, std::f64::consts::FRAC_PI_2),
            &Config::new(1.0, 1.17, std::f64::consts::FRAC_PI_2),
            0.3,
        );
        assert_abs_diff_eq!(input.foot_x, 0.17, epsilon = 1e-12);
        assert_abs_diff_eq!(input.apex_vel_y, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_sequence_yields_empty_branch() {
        let root = Config::new(0.0, 0.0, 0.0);
        let branch = propagate_branch(
            &root,
            &straight_seed(),
            &[],
            &LipmParams::flat(1.0),
            0.3,
            0.0,
        );
        assert!(branch.is_empty());
        assert!(branch.is_complete());
        assert_eq!(branch.duration, 0.0);
    }

    #[test]
    fn straight_steps_sum_to_symmetric_periods() {
        let root = Config::new(0.0, 0.0, 0.0);
        let configs: Vec<_> = (1..=3)
            .map(|j| Config::new(0.17 * j as f64, 0.0, 0.0))
            .collect();
        let lipm = LipmParams::flat(1.0);
        let t_seed = 1.5;
        let branch = propagate_branch(&root, &straight_seed(), &configs, &lipm, 0.3, t_seed);
        assert!(branch.is_complete());
        assert_eq!(branch.len(), 3);

        let omega = lipm.omega(0.0).unwrap();
        let period = symmetric_step_period(0.17, 0.3, omega);
        assert_abs_diff_eq!(branch.duration, 3.0 * period, epsilon = 1e-9);
        for (j, &t) in branch.arrival_times.iter().enumerate() {
            assert_abs_diff_eq!(t, t_seed + period * (j + 1) as f64, epsilon = 1e-9);
        }
        // Mirror alignment.
        assert_eq!(branch.params.len(), branch.configs.len());
        assert_eq!(branch.footsteps.len(), branch.configs.len());

        // Global footsteps alternate laterally around the walked line.
        assert!(branch.footsteps[0].y * branch.footsteps[1].y < 0.0);
        for (f, q) in branch.footsteps.iter().zip(&branch.configs) {
            assert_abs_diff_eq!(f.x, q.x, epsilon = 1e-12);
        }
    }

    #[test]
    fn branch_timing_is_invariant_under_rigid_motion() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lipm = LipmParams::flat(1.0);

        // A gently curving branch.
        let mut configs = Vec::new();
        for j in 1..=8 {
            let theta = 0.06 * j as f64;
            configs.push(Config::new(
                0.16 * j as f64,
                0.01 * (j * j) as f64 * 0.06,
                theta,
            ));
        }
        let root = Config::new(0.0, 0.0, 0.0);
        let base = propagate_branch(&root, &straight_seed(), &configs, &lipm, 0.3, 0.0);
        assert!(base.is_complete());

        for _ in 0..20 {
            let motion = Pose2::new(
                Vec2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            let move_config = |q: &Config<f64>| {
                let p = motion.to_global(q.position());
                Config::new(p.x, p.y, q.theta + motion.theta)
            };
            let moved_root = move_config(&root);
            let moved_configs: Vec<_> = configs.iter().map(move_config).collect();
            let moved = propagate_branch(
                &moved_root,
                &straight_seed(),
                &moved_configs,
                &lipm,
                0.3,
                0.0,
            );
            assert!(moved.is_complete());
            assert_abs_diff_eq!(moved.duration, base.duration, epsilon = 1e-9);
            for (a, b) in base.params.iter().zip(&moved.params) {
                assert_abs_diff_eq!(a.t_switch, b.t_switch, epsilon = 1e-9);
                assert_abs_diff_eq!(a.t_apex, b.t_apex, epsilon = 1e-9);
                assert_abs_diff_eq!(a.foot.x, b.foot.x, epsilon = 1e-9);
                assert_abs_diff_eq!(a.foot.y, b.foot.y, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn duration_is_additive_over_concatenation() {
        let lipm = LipmParams::flat(1.0);
        let root = Config::new(0.0, 0.0, 0.0);
        let configs: Vec<_> = (1..=6)
            .map(|j| Config::new(0.17 * j as f64, 0.0, 0.0))
            .collect();
        let whole = propagate_branch(&root, &straight_seed(), &configs, &lipm, 0.3, 0.0);

        let first = propagate_branch(&root, &straight_seed(), &configs[..3], &lipm, 0.3, 0.0);
        let mid = first.configs[2];
        let mid_stance = first.params[2]
            .stance()
            .to_global(&Pose2::from_config(&first.configs[1]))
            .to_local(&Pose2::from_config(&mid));
        let rest = propagate_branch(&mid, &mid_stance, &configs[3..], &lipm, 0.3, first.duration);
        assert_abs_diff_eq!(
            whole.duration,
            first.duration + rest.duration,
            epsilon = 1e-12
        );
    }

    #[test]
    fn infeasible_step_truncates_with_prefix_kept() {
        let lipm = LipmParams::flat(1.0);
        let root = Config::new(0.0, 0.0, 0.0);
        // Third config steps backward in its parent frame.
        let configs = [
            Config::new(0.17, 0.0, 0.0),
            Config::new(0.34, 0.0, 0.0),
            Config::new(0.2, 0.0, 0.0),
        ];
        let branch = propagate_branch(&root, &straight_seed(), &configs, &lipm, 0.3, 0.0);
        assert_eq!(branch.stopped_by, Some(StopReason::Infeasible));
        assert_eq!(branch.len(), 2);
        assert_eq!(branch.params.len(), 2);
        assert_eq!(branch.arrival_times.len(), 2);
    }

    #[test]
    fn step_lengths_stay_within_bound() {
        // Nodes spaced by the Dubins module at most s_max apart keep their
        // parent-local sagittal placements within the bound as well.
        let lipm = LipmParams::flat(1.0);
        let root = Config::new(0.0, 0.0, 0.0);
        let path = crate::dubins::shortest_path(&root, &Config::new(2.0, 1.2, 0.9), 0.5).unwrap();
        let configs = crate::dubins::intermediate_nodes(&path, 0.17);
        let branch = propagate_branch(&root, &straight_seed(), &configs, &lipm, 0.3, 0.0);
        for p in &branch.params {
            assert!(p.foot.x > 0.0);
            assert!(p.foot.x <= 0.17 + 1e-9);
        }
    }

    #[test]
    fn truncate_restores_prefix_duration_exactly() {
        let lipm = LipmParams::flat(1.0);
        let root = Config::new(0.0, 0.0, 0.0);
        let configs: Vec<_> = (1..=5)
            .map(|j| Config::new(0.17 * j as f64, 0.0, 0.0))
            .collect();
        let mut branch = propagate_branch(&root, &straight_seed(), &configs, &lipm, 0.3, 2.0);
        let prefix = propagate_branch(&root, &straight_seed(), &configs[..2], &lipm, 0.3, 2.0);
        branch.truncate(2, StopReason::Collision);
        assert_eq!(branch.stopped_by, Some(StopReason::Collision));
        assert_eq!(branch.duration, prefix.duration);
        assert_eq!(branch.arrival_times, prefix.arrival_times);
    }

    #[test]
    fn lateral_state_carries_between_steps() {
        // The lateral apex state after one step seeds the next: recompute a
        // two-step branch manually through the lipm primitives.
        let lipm = LipmParams::flat(1.0);
        let omega = lipm.omega(0.0).unwrap();
        let root = Config::new(0.0, 0.0, 0.0);
        let configs = [Config::new(0.17, 0.0, 0.0), Config::new(0.34, 0.0, 0.0)];
        let branch = propagate_branch(&root, &straight_seed(), &configs, &lipm, 0.3, 0.0);

        let seed = straight_seed();
        let first = &branch.params[0];
        let y_sw = crate::lipm::state_at(
            &PendulumState::new(seed.apex_pos.y, seed.apex_vel.y),
            seed.foot.y,
            omega,
            first.t_switch,
        );
        let y_apex = crate::lipm::state_at(&y_sw, first.foot.y, omega, first.t_apex);
        assert_abs_diff_eq!(y_apex.pos, first.apex_pos.y, epsilon = 1e-12);
    }
}
