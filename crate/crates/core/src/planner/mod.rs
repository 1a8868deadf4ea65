//! The kinodynamic RRT loop: goal-biased sampling, k-closest Dubins
//! candidates, elapsed-walking-time nearest neighbor, collision-pruned
//! extension, goal connection and solution extraction.

mod rewire;
mod tree;

pub use rewire::{rewire, RewireStats};
pub use tree::{Node, NodeId, Tree};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dubins;
use crate::geom::{angle_diff, Bounds, Config, KinematicParams, Pose2, Vec2};
use crate::lipm::{LipmParams, LocomotionParams};
use crate::propagation::{propagate_branch, Branch, StopReason};
use crate::scalar::Real;
use crate::world::World;

/// Planner knobs with the conventional defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig<T> {
    pub k_nearest: usize,
    pub goal_bias: T,
    pub goal_tol_pos: T,
    pub goal_tol_heading: T,
    pub max_iterations: usize,
    pub rewire_iterations: usize,
    pub rng_seed: u64,
    /// Evaluate the k candidate branches as a parallel map. The reduction is
    /// order-deterministic either way.
    pub parallel: bool,
}

impl<T: Real> Default for PlannerConfig<T> {
    fn default() -> Self {
        Self {
            k_nearest: 20,
            goal_bias: T::of(0.1),
            goal_tol_pos: T::of(0.05),
            goal_tol_heading: T::of(0.1),
            max_iterations: 200_000,
            rewire_iterations: 5_000,
            rng_seed: 0,
            parallel: false,
        }
    }
}

/// A fully specified planning problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanProblem<T> {
    pub start: Config<T>,
    pub goal: Config<T>,
    /// Seed locomotion state of the root node, global frame.
    pub seed_loco: LocomotionParams<T>,
    pub bounds: Bounds<T>,
    pub kinematics: KinematicParams<T>,
    pub lipm: LipmParams<T>,
    pub world: World<T>,
    pub config: PlannerConfig<T>,
}

/// Counters describing one planning run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub samples_drawn: usize,
    pub goal_biased_samples: usize,
    pub extensions: usize,
    pub nodes_added: usize,
    pub dynamic_truncations: usize,
    pub collision_prunes: usize,
    pub skipped_iterations: usize,
    pub tree_size: usize,
    pub solved: bool,
}

/// One step of an extracted solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionStep<T> {
    pub config: Config<T>,
    /// Expressed in the previous step's frame; step 0 in the global frame.
    pub loco: LocomotionParams<T>,
    pub arrival_time: T,
}

/// The root-to-goal step sequence with its mirror locomotion parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution<T> {
    pub steps: Vec<SolutionStep<T>>,
}

impl<T: Real> Solution<T> {
    pub fn from_tree(tree: &Tree<T>, goal: NodeId) -> Self {
        let steps = tree
            .path_to_root(goal)
            .into_iter()
            .map(|id| {
                let node = tree.node(id);
                SolutionStep {
                    config: node.config,
                    loco: node.loco,
                    arrival_time: node.arrival_time,
                }
            })
            .collect();
        Self { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Walking steps taken (excludes the seed step at the root).
    pub fn step_count(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    pub fn duration(&self) -> T {
        match (self.steps.first(), self.steps.last()) {
            (Some(first), Some(last)) => last.arrival_time - first.arrival_time,
            _ => T::zero(),
        }
    }

    /// The frame each step's locomotion parameters are expressed in.
    pub fn frame_of_step(&self, index: usize) -> Pose2<T> {
        if index == 0 {
            Pose2::identity()
        } else {
            Pose2::from_config(&self.steps[index - 1].config)
        }
    }

    /// Foot placements in the global frame, one per step.
    pub fn global_footsteps(&self) -> Vec<Vec2<T>> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| self.frame_of_step(i).to_global(s.loco.foot))
            .collect()
    }

    /// Stance state of a step re-expressed in its own frame.
    pub fn stance_in_own_frame(&self, index: usize) -> crate::lipm::StanceState<T> {
        let own = Pose2::from_config(&self.steps[index].config);
        self.steps[index]
            .loco
            .stance()
            .to_global(&self.frame_of_step(index))
            .to_local(&own)
    }
}

/// Result of the planning loop.
#[derive(Debug, Clone)]
pub struct PlanOutcome<T> {
    pub tree: Tree<T>,
    pub goal_node: Option<NodeId>,
    pub solution: Option<Solution<T>>,
    pub diagnostics: Diagnostics,
}

/// Result of the full pipeline (plan + rewire).
#[derive(Debug, Clone)]
pub struct SolveOutcome<T> {
    pub tree: Tree<T>,
    pub diagnostics: Diagnostics,
    pub pre_rewire: Option<Solution<T>>,
    pub post_rewire: Option<Solution<T>>,
    pub rewire_stats: RewireStats<T>,
}

fn sample_axis<T: Real>(rng: &mut impl Rng, lo: T, hi: T) -> T {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

fn sample_axis_half_open<T: Real>(rng: &mut impl Rng, lo: T, hi: T) -> T {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// Uniform sample of the configuration space; the heading axis is half-open.
pub fn sample_config<T: Real>(bounds: &Bounds<T>, rng: &mut impl Rng) -> Config<T> {
    let x = sample_axis(rng, bounds.min[0], bounds.max[0]);
    let y = sample_axis(rng, bounds.min[1], bounds.max[1]);
    let theta = sample_axis_half_open(rng, bounds.min[2], bounds.max[2]);
    Config::new(x, y, theta)
}

/// The k tree nodes with the shortest Dubins path to `target`, ties broken
/// by node id ascending. Exhaustive over the tree.
pub fn k_closest<T: Real>(tree: &Tree<T>, target: &Config<T>, k: usize, r_min: T) -> Vec<NodeId> {
    let mut lengths: Vec<(T, usize)> = tree
        .nodes()
        .iter()
        .map(|n| {
            let len = dubins::shortest_path(&n.config, target, r_min)
                .map(|p| p.total_length)
                .unwrap_or_else(|_| T::infinity());
            (len, n.id.0)
        })
        .collect();
    let k = k.min(lengths.len()).max(1);
    let cmp = |a: &(T, usize), b: &(T, usize)| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
    };
    if lengths.len() > k {
        lengths.select_nth_unstable_by(k - 1, cmp);
        lengths.truncate(k);
    }
    lengths.sort_unstable_by(cmp);
    lengths.into_iter().map(|(_, id)| NodeId(id)).collect()
}

/// Choose among candidate branches by smallest total duration. Branches that
/// failed to reach the sample are excluded unless all candidates failed, in
/// which case the longest usable prefix (then smallest duration) wins. Ties
/// go to the earlier candidate. `None` when every candidate is empty.
pub fn select_nearest_by_time<T: Real>(branches: &[Branch<T>]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, b) in branches.iter().enumerate() {
        if b.is_complete() && !b.is_empty() {
            let better = match best {
                None => true,
                Some(j) => b.duration < branches[j].duration,
            };
            if better {
                best = Some(i);
            }
        }
    }
    if best.is_some() {
        return best;
    }
    for (i, b) in branches.iter().enumerate() {
        if b.is_empty() {
            continue;
        }
        let better = match best {
            None => true,
            Some(j) => {
                let prev = &branches[j];
                b.len() > prev.len() || (b.len() == prev.len() && b.duration < prev.duration)
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}

fn reaches_goal<T: Real>(q: &Config<T>, goal: &Config<T>, tol_pos: T, tol_heading: T) -> bool {
    q.position().distance(goal.position()) <= tol_pos
        && angle_diff(q.theta, goal.theta).abs() <= tol_heading
}

fn build_candidate_branch<T: Real>(
    tree: &Tree<T>,
    id: NodeId,
    target: &Config<T>,
    kin: &KinematicParams<T>,
    lipm: &LipmParams<T>,
) -> Branch<T> {
    let node = tree.node(id);
    match dubins::shortest_path(&node.config, target, kin.r_min) {
        Err(_) => Branch::empty(node.arrival_time),
        Ok(path) => {
            let configs = dubins::intermediate_nodes(&path, kin.s_max);
            propagate_branch(
                &node.config,
                &tree.stance_in_own_frame(id),
                &configs,
                lipm,
                kin.speed,
                node.arrival_time,
            )
        }
    }
}

/// Run the sampling loop until a node reaches the goal within tolerance or
/// the iteration budget is exhausted (reported explicitly, never silently).
pub fn plan<T: Real>(problem: &PlanProblem<T>) -> PlanOutcome<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(problem.config.rng_seed);
    plan_with_rng(problem, &mut rng)
}

pub fn plan_with_rng<T: Real>(problem: &PlanProblem<T>, rng: &mut ChaCha8Rng) -> PlanOutcome<T> {
    let cfg = &problem.config;
    let kin = &problem.kinematics;
    let mut tree = Tree::new(problem.start, problem.seed_loco);
    let mut diag = Diagnostics::default();
    let mut goal_node = None;

    if reaches_goal(
        &problem.start,
        &problem.goal,
        cfg.goal_tol_pos,
        cfg.goal_tol_heading,
    ) {
        goal_node = Some(NodeId(0));
    }

    while goal_node.is_none() && diag.iterations < cfg.max_iterations {
        diag.iterations += 1;
        let draw: T = rng.gen_range(T::zero()..T::one());
        let target = if draw < cfg.goal_bias {
            diag.goal_biased_samples += 1;
            problem.goal
        } else {
            diag.samples_drawn += 1;
            sample_config(&problem.bounds, rng)
        };

        let candidates = k_closest(&tree, &target, cfg.k_nearest, kin.r_min);
        let tree_ref = &tree;
        let branches: Vec<Branch<T>> = if cfg.parallel {
            candidates
                .par_iter()
                .map(|&id| build_candidate_branch(tree_ref, id, &target, kin, &problem.lipm))
                .collect()
        } else {
            candidates
                .iter()
                .map(|&id| build_candidate_branch(tree_ref, id, &target, kin, &problem.lipm))
                .collect()
        };
        diag.dynamic_truncations += branches
            .iter()
            .filter(|b| b.stopped_by == Some(StopReason::Infeasible))
            .count();

        let Some(best) = select_nearest_by_time(&branches) else {
            diag.skipped_iterations += 1;
            continue;
        };
        let parent = candidates[best];
        let chosen = branches
            .into_iter()
            .nth(best)
            .expect("selected index in range");
        let len_before = chosen.len();
        let pruned = problem.world.prune_branch_for_collision(chosen);
        if pruned.len() < len_before {
            diag.collision_prunes += 1;
        }
        if pruned.is_empty() {
            diag.skipped_iterations += 1;
            continue;
        }
        let ids = tree.extend(parent, &pruned);
        diag.extensions += 1;
        diag.nodes_added += ids.len();
        for id in ids {
            if reaches_goal(
                &tree.node(id).config,
                &problem.goal,
                cfg.goal_tol_pos,
                cfg.goal_tol_heading,
            ) {
                goal_node = Some(id);
                break;
            }
        }
    }

    diag.tree_size = tree.len();
    diag.solved = goal_node.is_some();
    let solution = goal_node.map(|id| Solution::from_tree(&tree, id));
    PlanOutcome {
        tree,
        goal_node,
        solution,
        diagnostics: diag,
    }
}

/// Plan, then smooth the solution with the rewiring pass. One RNG stream
/// (seeded from the planner config) drives both phases.
pub fn solve<T: Real>(problem: &PlanProblem<T>) -> SolveOutcome<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(problem.config.rng_seed);
    let outcome = plan_with_rng(problem, &mut rng);
    let (post, stats) = match &outcome.solution {
        Some(pre) => {
            let (rewired, stats) = rewire(
                pre,
                &problem.world,
                &problem.kinematics,
                &problem.lipm,
                problem.config.rewire_iterations,
                &mut rng,
            );
            (Some(rewired), stats)
        }
        None => (None, RewireStats::default()),
    };
    SolveOutcome {
        tree: outcome.tree,
        diagnostics: outcome.diagnostics,
        pre_rewire: outcome.solution,
        post_rewire: post,
        rewire_stats: stats,
    }
}
