//! Spatio-temporal environment model: static walls and moving obstacles with
//! known parametric trajectories, queryable at any future time.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Bounds, Vec2};
use crate::propagation::{Branch, StopReason};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WorldError {
    #[error("safety_radius must be strictly positive")]
    NonPositiveSafetyRadius,
    #[error("obstacle {index}: {problem}")]
    BadObstacle { index: usize, problem: String },
}

/// An oriented rectangle: center, half extents and rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedRect<T> {
    pub center: Vec2<T>,
    pub half_extents: Vec2<T>,
    pub orientation: T,
}

impl<T: Real> OrientedRect<T> {
    /// Smallest distance from `p` to the rectangle (zero inside).
    pub fn distance_to_point(&self, p: Vec2<T>) -> T {
        let d = p - self.center;
        let (s, c) = self.orientation.sin_cos();
        let local = Vec2::new(c * d.x + s * d.y, -s * d.x + c * d.y);
        let qx = local.x.abs() - self.half_extents.x;
        let qy = local.y.abs() - self.half_extents.y;
        let outside = Vec2::new(qx.max(T::zero()), qy.max(T::zero()));
        outside.norm()
    }

    /// True when a disc of `radius` about `p` touches the rectangle.
    pub fn intersects_disc(&self, p: Vec2<T>, radius: T) -> bool {
        self.distance_to_point(p) <= radius
    }
}

/// Parametric obstacle motion. Orientation stays fixed; only the center moves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Motion<T> {
    Static,
    /// Uniform translation from the t=0 center, optionally reflected between
    /// displacement bounds `(lo, hi)` (meters along the velocity direction,
    /// with `lo <= 0 <= hi`).
    Linear {
        velocity: Vec2<T>,
        ping_pong: Option<(T, T)>,
    },
    /// Revolution about `center` at `radius`, angle `phase + rate * t`.
    Circular {
        center: Vec2<T>,
        radius: T,
        rate: T,
        phase: T,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle<T> {
    pub shape: OrientedRect<T>,
    pub motion: Motion<T>,
}

impl<T: Real> Obstacle<T> {
    pub fn static_rect(center: Vec2<T>, half_extents: Vec2<T>, orientation: T) -> Self {
        Self {
            shape: OrientedRect {
                center,
                half_extents,
                orientation,
            },
            motion: Motion::Static,
        }
    }

    pub fn linear(
        start: Vec2<T>,
        velocity: Vec2<T>,
        ping_pong: Option<(T, T)>,
        half_extents: Vec2<T>,
        orientation: T,
    ) -> Self {
        Self {
            shape: OrientedRect {
                center: start,
                half_extents,
                orientation,
            },
            motion: Motion::Linear {
                velocity,
                ping_pong,
            },
        }
    }

    pub fn circular(
        motion_center: Vec2<T>,
        radius: T,
        rate: T,
        phase: T,
        half_extents: Vec2<T>,
        orientation: T,
    ) -> Self {
        let start = motion_center + Vec2::new(phase.cos(), phase.sin()).scale(radius);
        Self {
            shape: OrientedRect {
                center: start,
                half_extents,
                orientation,
            },
            motion: Motion::Circular {
                center: motion_center,
                radius,
                rate,
                phase,
            },
        }
    }

    /// Bounding box posed at time `t`.
    pub fn pose_at(&self, t: T) -> OrientedRect<T> {
        let center = match self.motion {
            Motion::Static => self.shape.center,
            Motion::Linear {
                velocity,
                ping_pong,
            } => {
                let speed = velocity.norm();
                match ping_pong {
                    None => self.shape.center + velocity.scale(t),
                    Some((lo, hi)) => {
                        if speed == T::zero() || hi <= lo {
                            self.shape.center
                        } else {
                            let dir = velocity.scale(T::one() / speed);
                            let span = hi - lo;
                            let travel = speed * t;
                            // Triangle wave over [lo, hi], starting at 0 and
                            // moving in the +velocity direction.
                            let m = (travel - lo) % (T::of(2.0) * span);
                            let m = if m < T::zero() {
                                m + T::of(2.0) * span
                            } else {
                                m
                            };
                            let disp = if m <= span {
                                lo + m
                            } else {
                                lo + T::of(2.0) * span - m
                            };
                            self.shape.center + dir.scale(disp)
                        }
                    }
                }
            }
            Motion::Circular {
                center,
                radius,
                rate,
                phase,
            } => {
                let angle = phase + rate * t;
                center + Vec2::new(angle.cos(), angle.sin()).scale(radius)
            }
        };
        OrientedRect {
            center,
            half_extents: self.shape.half_extents,
            orientation: self.shape.orientation,
        }
    }

    fn validate(&self, index: usize) -> Result<(), WorldError> {
        let he = self.shape.half_extents;
        let extents_ok = he.x > T::zero() && he.y > T::zero();
        if !extents_ok {
            return Err(WorldError::BadObstacle {
                index,
                problem: "half_extents must be strictly positive".into(),
            });
        }
        if let Motion::Circular { radius, .. } = self.motion {
            if radius < T::zero() {
                return Err(WorldError::BadObstacle {
                    index,
                    problem: "circular radius must be non-negative".into(),
                });
            }
        }
        if let Motion::Linear {
            ping_pong: Some((lo, hi)),
            ..
        } = self.motion
        {
            if !(lo <= T::zero() && T::zero() <= hi && lo < hi) {
                return Err(WorldError::BadObstacle {
                    index,
                    problem: "ping_pong bounds must satisfy lo <= 0 <= hi, lo < hi".into(),
                });
            }
        }
        Ok(())
    }
}

/// The environment: obstacles, configuration-space bounds and the circular
/// safety margin around each foot placement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World<T> {
    pub obstacles: Vec<Obstacle<T>>,
    pub bounds: Bounds<T>,
    pub safety_radius: T,
}

impl<T: Real> World<T> {
    pub fn new(
        obstacles: Vec<Obstacle<T>>,
        bounds: Bounds<T>,
        safety_radius: T,
    ) -> Result<Self, WorldError> {
        let radius_ok = safety_radius.is_finite() && safety_radius > T::zero();
        if !radius_ok {
            return Err(WorldError::NonPositiveSafetyRadius);
        }
        for (i, obs) in obstacles.iter().enumerate() {
            obs.validate(i)?;
        }
        Ok(Self {
            obstacles,
            bounds,
            safety_radius,
        })
    }

    /// True when the safety disc about `point` intersects no obstacle posed
    /// at time `t` and the point lies inside the world bounds.
    pub fn is_free(&self, point: Vec2<T>, t: T) -> bool {
        if !self.bounds.contains_position(point) {
            return false;
        }
        self.obstacles
            .iter()
            .all(|obs| !obs.pose_at(t).intersects_disc(point, self.safety_radius))
    }

    /// True when every node of the branch is free at its own arrival time.
    pub fn branch_is_free(&self, branch: &Branch<T>) -> bool {
        branch
            .footsteps
            .iter()
            .zip(&branch.arrival_times)
            .all(|(&foot, &t)| self.is_free(foot, t))
    }

    /// Keep the longest prefix whose footsteps are all free at their arrival
    /// times; an empty prefix is valid.
    pub fn prune_branch_for_collision(&self, mut branch: Branch<T>) -> Branch<T> {
        let first_hit = branch
            .footsteps
            .iter()
            .zip(&branch.arrival_times)
            .position(|(&foot, &t)| !self.is_free(foot, t));
        if let Some(index) = first_hit {
            branch.truncate(index, StopReason::Collision);
        }
        branch
    }
}
