//! Time-optimal bipedal walking route planning.
//!
//! The crate combines analytic linear-inverted-pendulum dynamics with a
//! phase-space step solver, Dubins-path steering and a kinodynamic RRT whose
//! metric is elapsed walking time, plus spatio-temporal collision checking
//! against moving obstacles and a rewiring pass that shortcuts the solution.
//!
//! All core math is generic over the scalar type ([`scalar::Real`], i.e.
//! `f32` or `f64`); concrete `f64` aliases live at the crate root. Scenario
//! files, the batch driver and all exporters operate in `f64`.

pub mod dubins;
pub mod export;
pub mod geom;
pub mod lipm;
pub mod planner;
pub mod propagation;
pub mod scalar;
pub mod scenario;
pub mod solution;
pub mod world;

pub use scalar::Real;

pub type Config64 = geom::Config<f64>;
pub type Config32 = geom::Config<f32>;
pub type Pose64 = geom::Pose2<f64>;
pub type Vec64 = geom::Vec2<f64>;
pub type DubinsPath64 = dubins::DubinsPath<f64>;
pub type LocomotionParams64 = lipm::LocomotionParams<f64>;
pub type Branch64 = propagation::Branch<f64>;
pub type World64 = world::World<f64>;
pub type Tree64 = planner::Tree<f64>;
pub type Solution64 = planner::Solution<f64>;
pub type PlanProblem64 = planner::PlanProblem<f64>;
