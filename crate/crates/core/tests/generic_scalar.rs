//! The core pipeline is generic over the scalar type: drive a small plan at
//! `f32` and `f64` and check the two agree to single precision.

use stride_core::geom::{Bounds, Config, KinematicParams, Vec2};
use stride_core::lipm::{psp_step, LipmParams, LocomotionParams, StanceState, StepInput};
use stride_core::planner::{plan, PlanProblem, PlannerConfig};
use stride_core::scalar::Real;
use stride_core::world::World;
use stride_core::{dubins, Config32, Config64};

fn straight_problem<T: Real>() -> PlanProblem<T> {
    let bounds = Bounds::new(
        [T::of(-1.0), T::of(-1.0), T::zero()],
        [T::of(3.0), T::of(1.0), T::TAU()],
    );
    PlanProblem {
        start: Config::new(T::zero(), T::zero(), T::zero()),
        goal: Config::new(T::of(1.7), T::zero(), T::zero()),
        seed_loco: LocomotionParams {
            foot: Vec2::new(T::zero(), T::of(-0.078)),
            apex_pos: Vec2::new(T::zero(), T::zero()),
            apex_vel: Vec2::new(T::of(0.3), T::zero()),
            t_switch: T::zero(),
            t_apex: T::zero(),
        },
        bounds,
        kinematics: KinematicParams::new(T::of(0.5), T::of(0.17), T::of(0.3)).unwrap(),
        lipm: LipmParams::flat(T::one()),
        world: World::new(vec![], bounds, T::of(0.3)).unwrap(),
        config: PlannerConfig {
            goal_bias: T::of(0.9),
            max_iterations: 200,
            rng_seed: 1,
            ..PlannerConfig::default()
        },
    }
}

#[test]
fn f32_and_f64_pipelines_agree_to_single_precision() {
    let coarse = plan(&straight_problem::<f32>());
    let fine = plan(&straight_problem::<f64>());
    assert!(coarse.diagnostics.solved && fine.diagnostics.solved);
    let coarse = coarse.solution.unwrap();
    let fine = fine.solution.unwrap();
    assert_eq!(coarse.step_count(), 10);
    assert_eq!(coarse.step_count(), fine.step_count());
    assert!((coarse.duration() as f64 - fine.duration()).abs() < 1e-4);
}

#[test]
fn f32_primitives_hold_relaxed_tolerances() {
    let a: Config32 = Config::new(0.0, 0.0, 0.0);
    let b: Config32 = Config::new(1.3, 0.8, 0.6);
    let path = dubins::shortest_path(&a, &b, 0.5f32).unwrap();
    let end = dubins::point_at_arclength(&path, path.total_length).unwrap();
    assert!(end.almost_eq(&b, 1e-4));

    let a64: Config64 = Config::new(0.0, 0.0, 0.0);
    let b64: Config64 = Config::new(1.3, 0.8, 0.6);
    let path64 = dubins::shortest_path(&a64, &b64, 0.5f64).unwrap();
    assert_eq!(format!("{}", path.family), format!("{}", path64.family));
    assert!((path.total_length as f64 - path64.total_length).abs() < 1e-4);

    let stance = StanceState {
        foot: Vec2::new(0.0f32, -0.078),
        apex_pos: Vec2::new(0.0, 0.0),
        apex_vel: Vec2::new(0.3, 0.0),
    };
    let input = StepInput {
        foot_x: 0.17f32,
        apex_vel_x: 0.3,
        apex_vel_y: 0.0,
    };
    let out = psp_step(&stance, &input, &LipmParams::flat(1.0f32)).unwrap();
    assert!((out.t_switch - out.t_apex).abs() < 1e-5);
    assert!((out.foot_y - 0.1307).abs() < 1e-3);
}
