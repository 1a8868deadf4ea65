//! Planar geometry foundation: configurations, SE(2) frames, angle
//! normalization and the kinematic parameter set shared by all modules.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("{field} must be finite")]
    NonFinite { field: &'static str },
    #[error("{field} must be strictly positive")]
    NonPositive { field: &'static str },
    #[error("s_max must be smaller than one full turning circle (2*pi*r_min)")]
    StepWrapsTurningCircle,
}

/// Wrap an angle into `[0, 2*pi)`.
///
/// Total on finite inputs; NaN propagates.
pub fn normalize_angle<T: Real>(theta: T) -> T {
    let tau = T::TAU();
    let r = theta % tau;
    let r = if r < T::zero() { r + tau } else { r };
    // `r + tau` can round up to exactly tau for tiny negative inputs.
    if r >= tau {
        T::zero()
    } else {
        r
    }
}

/// Signed angular difference `a - b`, wrapped into `(-pi, pi]`.
pub fn angle_diff<T: Real>(a: T, b: T) -> T {
    let d = normalize_angle(a - b);
    if d > T::PI() {
        d - T::TAU()
    } else {
        d
    }
}

/// A 2D point or vector in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    pub fn scale(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Real> std::ops::Add for Vec2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> std::ops::Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// A planar robot configuration `(x, y, theta)` in the global frame.
///
/// The heading is stored normalized to `[0, 2*pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config<T> {
    pub x: T,
    pub y: T,
    pub theta: T,
}

impl<T: Real> Config<T> {
    pub fn new(x: T, y: T, theta: T) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn position(&self) -> Vec2<T> {
        Vec2::new(self.x, self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.theta.is_finite()
    }

    /// True when both configurations agree within `tol` in x, y and in
    /// circular heading distance.
    pub fn almost_eq(&self, other: &Self, tol: T) -> bool {
        (self.x - other.x).abs() <= tol
            && (self.y - other.y).abs() <= tol
            && angle_diff(self.theta, other.theta).abs() <= tol
    }
}

/// An SE(2) frame: an origin point plus a heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2<T> {
    pub origin: Vec2<T>,
    pub theta: T,
}

impl<T: Real> Pose2<T> {
    pub fn new(origin: Vec2<T>, theta: T) -> Self {
        Self {
            origin,
            theta: normalize_angle(theta),
        }
    }

    pub fn identity() -> Self {
        Self::new(Vec2::zero(), T::zero())
    }

    pub fn from_config(q: &Config<T>) -> Self {
        Self::new(q.position(), q.theta)
    }

    /// Express a global-frame point in this frame's coordinates.
    pub fn to_local(&self, p: Vec2<T>) -> Vec2<T> {
        let d = p - self.origin;
        let (s, c) = self.theta.sin_cos();
        Vec2::new(c * d.x + s * d.y, -s * d.x + c * d.y)
    }

    /// Express a point given in this frame's coordinates in the global frame.
    pub fn to_global(&self, p: Vec2<T>) -> Vec2<T> {
        let (s, c) = self.theta.sin_cos();
        self.origin + Vec2::new(c * p.x - s * p.y, s * p.x + c * p.y)
    }

    /// Rotate a global-frame vector (velocity) into this frame. No translation.
    pub fn vec_to_local(&self, v: Vec2<T>) -> Vec2<T> {
        let (s, c) = self.theta.sin_cos();
        Vec2::new(c * v.x + s * v.y, -s * v.x + c * v.y)
    }

    /// Rotate a frame-local vector (velocity) into the global frame.
    pub fn vec_to_global(&self, v: Vec2<T>) -> Vec2<T> {
        let (s, c) = self.theta.sin_cos();
        Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
    }
}

/// Kinematic limits of the walking model: minimum turning radius, maximum
/// step length and the constant forward apex speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicParams<T> {
    pub r_min: T,
    pub s_max: T,
    pub speed: T,
}

impl<T: Real> KinematicParams<T> {
    pub fn new(r_min: T, s_max: T, speed: T) -> Result<Self, GeomError> {
        for (value, field) in [(r_min, "r_min"), (s_max, "s_max"), (speed, "speed")] {
            if !value.is_finite() {
                return Err(GeomError::NonFinite { field });
            }
            if value <= T::zero() {
                return Err(GeomError::NonPositive { field });
            }
        }
        if s_max >= T::TAU() * r_min {
            return Err(GeomError::StepWrapsTurningCircle);
        }
        Ok(Self {
            r_min,
            s_max,
            speed,
        })
    }
}

/// Per-axis sampling boundary `(q_min, q_max)` of the configuration space.
///
/// Stored normalized so that `min[i] <= max[i]` on every axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds<T> {
    pub min: [T; 3],
    pub max: [T; 3],
}

impl<T: Real> Bounds<T> {
    /// Build bounds from two corner triples, swapping per axis as needed.
    pub fn new(a: [T; 3], b: [T; 3]) -> Self {
        let mut min = a;
        let mut max = b;
        for i in 0..3 {
            if min[i] > max[i] {
                std::mem::swap(&mut min[i], &mut max[i]);
            }
        }
        Self { min, max }
    }

    pub fn contains_position(&self, p: Vec2<T>) -> bool {
        p.x >= self.min[0] && p.x <= self.max[0] && p.y >= self.min[1] && p.y <= self.max[1]
    }

    pub fn is_finite(&self) -> bool {
        self.min
            .iter()
            .chain(self.max.iter())
            .all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    #[test]
    fn normalize_angle_examples() {
        assert_eq!(normalize_angle(0.0), 0.0);
        assert_abs_diff_eq!(
            normalize_angle(-FRAC_PI_2),
            3.0 * FRAC_PI_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            normalize_angle(7.0 * FRAC_PI_2),
            3.0 * FRAC_PI_2,
            epsilon = 1e-12
        );
        assert!(normalize_angle(f64::NAN).is_nan());
        // Tiny negative inputs must not round up to exactly tau.
        assert!(normalize_angle(-1e-20) < TAU);
    }

    #[test]
    fn angle_diff_wraps_into_signed_half_turn() {
        assert_abs_diff_eq!(angle_diff(0.1, 0.3), -0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(angle_diff(0.1, TAU - 0.1), 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(angle_diff(PI, 0.0), PI, epsilon = 1e-15);
    }

    #[test]
    fn to_local_identity_frame() {
        let f = Pose2::new(Vec2::new(0.0, 0.0), 0.0);
        assert_eq!(f.to_local(Vec2::new(3.0, 4.0)), Vec2::new(3.0, 4.0));
        assert_eq!(f.to_global(Vec2::new(3.0, 4.0)), Vec2::new(3.0, 4.0));
    }

    #[test]
    fn to_local_quarter_turn_by_hand() {
        let f = Pose2::new(Vec2::new(1.0, 0.0), FRAC_PI_2);
        let local = f.to_local(Vec2::new(1.0, 2.0));
        assert_abs_diff_eq!(local.x, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(local.y, 0.0, epsilon = 1e-15);
        let back = f.to_global(Vec2::new(2.0, 0.0));
        assert_abs_diff_eq!(back.x, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(back.y, 2.0, epsilon = 1e-15);
    }

    /// 3x3 homogeneous-matrix oracle for the frame transforms.
    fn matrix_to_local(frame: &Pose2<f64>, p: Vec2<f64>) -> Vec2<f64> {
        let (s, c) = frame.theta.sin_cos();
        // Inverse of [[c, -s, ox], [s, c, oy], [0, 0, 1]].
        let inv = [
            [c, s, -(c * frame.origin.x + s * frame.origin.y)],
            [-s, c, -(-s * frame.origin.x + c * frame.origin.y)],
            [0.0, 0.0, 1.0],
        ];
        let v = [p.x, p.y, 1.0];
        Vec2::new(
            inv[0][0] * v[0] + inv[0][1] * v[1] + inv[0][2] * v[2],
            inv[1][0] * v[0] + inv[1][1] * v[1] + inv[1][2] * v[2],
        )
    }

    #[test]
    fn to_local_translation_only_matches_matrix_oracle() {
        let f = Pose2::new(Vec2::new(0.195, -0.052), 0.0);
        let p = Vec2::new(0.365, -0.052);
        let got = f.to_local(p);
        let want = matrix_to_local(&f, p);
        assert_abs_diff_eq!(got.x, 0.17, epsilon = 1e-12);
        assert_abs_diff_eq!(got.y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(got.x, want.x, epsilon = 1e-15);
        assert_abs_diff_eq!(got.y, want.y, epsilon = 1e-15);
    }

    #[test]
    fn transform_round_trip_random_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let f = Pose2::new(
                Vec2::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)),
                rng.gen_range(-10.0..10.0),
            );
            let p = Vec2::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            let round = f.to_global(f.to_local(p));
            assert_abs_diff_eq!(round.x, p.x, epsilon = 1e-12);
            assert_abs_diff_eq!(round.y, p.y, epsilon = 1e-12);
            let oracle = matrix_to_local(&f, p);
            let local = f.to_local(p);
            assert_abs_diff_eq!(local.x, oracle.x, epsilon = 1e-12);
            assert_abs_diff_eq!(local.y, oracle.y, epsilon = 1e-12);
        }
    }

    #[test]
    fn velocity_transform_is_rotation_only() {
        let f = Pose2::new(Vec2::new(5.0, -3.0), FRAC_PI_2);
        // A velocity along global +x becomes local -y regardless of origin.
        let v = f.vec_to_local(Vec2::new(1.0, 0.0));
        assert_abs_diff_eq!(v.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.y, -1.0, epsilon = 1e-15);
        // The position transform of the same tuple differs (translation applies).
        let p = f.to_local(Vec2::new(1.0, 0.0));
        assert_abs_diff_eq!(p.x, 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.y, 4.0, epsilon = 1e-14);
        let back = f.vec_to_global(v);
        assert_abs_diff_eq!(back.x, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(back.y, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn config_normalizes_heading() {
        let q = Config::new(1.0, 2.0, -FRAC_PI_2);
        assert_abs_diff_eq!(q.theta, 3.0 * FRAC_PI_2, epsilon = 1e-15);
        assert!(q.is_finite());
        assert!(!Config::new(f64::NAN, 0.0, 0.0).is_finite());
    }

    #[test]
    fn kinematic_params_validation() {
        assert!(KinematicParams::new(0.5, 0.17, 0.3).is_ok());
        assert!(matches!(
            KinematicParams::new(0.0, 0.17, 0.3),
            Err(GeomError::NonPositive { field: "r_min" })
        ));
        assert!(matches!(
            KinematicParams::new(0.5, 0.17, f64::INFINITY),
            Err(GeomError::NonFinite { field: "speed" })
        ));
        // A step as long as the full turning circle is rejected.
        assert!(matches!(
            KinematicParams::new(0.5, TAU * 0.5, 0.3),
            Err(GeomError::StepWrapsTurningCircle)
        ));
    }

    #[test]
    fn bounds_normalize_per_axis() {
        let b = Bounds::new([-2.0, 12.0, 0.0], [-16.0, 2.0, TAU]);
        assert_eq!(b.min, [-16.0, 2.0, 0.0]);
        assert_eq!(b.max, [-2.0, 12.0, TAU]);
        assert!(b.contains_position(Vec2::new(-3.0, 5.0)));
        assert!(!b.contains_position(Vec2::new(0.0, 5.0)));
    }
}
