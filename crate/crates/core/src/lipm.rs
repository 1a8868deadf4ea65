//! Analytic linear-inverted-pendulum dynamics and the phase-space step
//! solver: closed-form CoM propagation, time inversion, switching-state
//! computation and lateral foot-placement solving.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Pose2, Vec2};
use crate::scalar::Real;

/// Why a candidate step has no dynamically consistent realization. Every
/// variant is non-fatal to the planner: the branch is simply cut short.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PspError {
    #[error("pendulum height a*p_x + b must be strictly positive")]
    NonPositiveHeight,
    #[error("orbit is a degenerate converging ray (A == 0)")]
    DegenerateOrbit,
    #[error("target state is not ahead on this orbit (log argument <= 0)")]
    UnreachableInTime,
    #[error("position is unreachable on this orbit (negative radicand)")]
    UnreachablePosition,
    #[error("consecutive footholds coincide")]
    RepeatedFoothold,
    #[error("step is not strictly forward (p_x2 <= p_x1 or apex velocity <= 0)")]
    NotForward,
    #[error("switch would occur before the parent apex (t_switch < 0)")]
    NegativeSwitchTime,
    #[error("apex would not follow the switch (t_apex <= 0)")]
    NonPositiveApexTime,
    #[error("lateral placement is undefined for t_apex == 0")]
    ZeroApexDuration,
}

/// Sign of the velocity root on an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelSign {
    Positive,
    Negative,
}

/// Pendulum environment: gravity and the linear height surface
/// `z = a*x + b` evaluated at the stance foot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipmParams<T> {
    pub gravity: T,
    pub slope: T,
    pub height: T,
}

impl<T: Real> LipmParams<T> {
    pub fn new(gravity: T, slope: T, height: T) -> Self {
        Self {
            gravity,
            slope,
            height,
        }
    }

    /// Flat ground at the given constant CoM height.
    pub fn flat(height: T) -> Self {
        Self::new(T::of(9.81), T::zero(), height)
    }

    /// Natural frequency `sqrt(g / (a*p_x + b))` for a stance at `foot_x`.
    pub fn omega(&self, foot_x: T) -> Result<T, PspError> {
        let h = self.slope * foot_x + self.height;
        let valid = h.is_finite() && h > T::zero() && self.gravity > T::zero();
        if !valid {
            return Err(PspError::NonPositiveHeight);
        }
        Ok((self.gravity / h).sqrt())
    }
}

impl<T: Real> Default for LipmParams<T> {
    fn default() -> Self {
        Self::flat(T::one())
    }
}

/// One-axis CoM state (position, velocity) in a stance-local frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumState<T> {
    pub pos: T,
    pub vel: T,
}

impl<T: Real> PendulumState<T> {
    pub fn new(pos: T, vel: T) -> Self {
        Self { pos, vel }
    }
}

/// Exponential coefficients of the closed-form solution about `foot`.
fn orbit_coefficients<T: Real>(s0: &PendulumState<T>, foot: T, omega: T) -> (T, T) {
    let half = T::of(0.5);
    let a = half * ((s0.pos - foot) + s0.vel / omega);
    let b = half * ((s0.pos - foot) - s0.vel / omega);
    (a, b)
}

/// Closed-form state after time `t` (negative `t` runs the orbit backward).
pub fn state_at<T: Real>(s0: &PendulumState<T>, foot: T, omega: T, t: T) -> PendulumState<T> {
    let (a, b) = orbit_coefficients(s0, foot, omega);
    let ep = (omega * t).exp();
    let en = (-(omega * t)).exp();
    PendulumState {
        pos: a * ep + b * en + foot,
        vel: omega * (a * ep - b * en),
    }
}

/// Invert the closed form for the time at which the orbit passes through
/// `target`. The result may be negative (target earlier on the orbit).
pub fn time_to_state<T: Real>(
    s0: &PendulumState<T>,
    foot: T,
    omega: T,
    target: &PendulumState<T>,
) -> Result<T, PspError> {
    let (a, _) = orbit_coefficients(s0, foot, omega);
    if a == T::zero() {
        return Err(PspError::DegenerateOrbit);
    }
    let arg = (target.pos + target.vel / omega - foot) / (T::of(2.0) * a);
    if arg.is_nan() || arg <= T::zero() {
        return Err(PspError::UnreachableInTime);
    }
    let t = arg.ln() / omega;
    if !t.is_finite() {
        return Err(PspError::UnreachableInTime);
    }
    Ok(t)
}

/// Velocity at position `x` on the orbit through `s0`, with the chosen sign.
pub fn velocity_on_orbit<T: Real>(
    x: T,
    s0: &PendulumState<T>,
    foot: T,
    omega: T,
    sign: VelSign,
) -> Result<T, PspError> {
    let dx = x - foot;
    let dx0 = s0.pos - foot;
    let radicand = omega * omega * (dx * dx - dx0 * dx0) + s0.vel * s0.vel;
    if radicand < T::zero() {
        return Err(PspError::UnreachablePosition);
    }
    let v = radicand.sqrt();
    Ok(match sign {
        VelSign::Positive => v,
        VelSign::Negative => -v,
    })
}

/// Sagittal position where the orbits of two consecutive stances intersect
/// in phase space (velocity continuity between the two steps).
pub fn switching_position<T: Real>(
    foot1: T,
    s1: &PendulumState<T>,
    foot2: T,
    s2: &PendulumState<T>,
    omega: T,
) -> Result<T, PspError> {
    if foot1 == foot2 {
        return Err(PspError::RepeatedFoothold);
    }
    let d1 = s1.pos - foot1;
    let d2 = s2.pos - foot2;
    let c = d1 * d1 - d2 * d2 + (s2.vel * s2.vel - s1.vel * s1.vel) / (omega * omega);
    Ok(T::of(0.5) * (c / (foot2 - foot1) + (foot1 + foot2)))
}

/// Lateral foot placement such that, `t_apex` after the switch state, the
/// lateral velocity equals `apex_vel_y`.
pub fn find_py<T: Real>(
    y_switch: &PendulumState<T>,
    apex_vel_y: T,
    t_apex: T,
    omega: T,
) -> Result<T, PspError> {
    let half = T::of(0.5);
    let ep = (omega * t_apex).exp();
    let en = (-(omega * t_apex)).exp();
    let c = half
        * omega
        * ((y_switch.pos + y_switch.vel / omega) * ep - (y_switch.pos - y_switch.vel / omega) * en);
    let d = half * omega * (en - ep);
    if d == T::zero() {
        return Err(PspError::ZeroApexDuration);
    }
    Ok((apex_vel_y - c) / d)
}

/// Per-step input triple: sagittal foot placement (parent-local) and the
/// desired apex velocity components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepInput<T> {
    pub foot_x: T,
    pub apex_vel_x: T,
    pub apex_vel_y: T,
}

/// Per-step output quadruple: timings, lateral placement and lateral apex
/// position, all in the parent-local frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOutput<T> {
    pub t_switch: T,
    pub t_apex: T,
    pub foot_y: T,
    pub apex_y: T,
}

/// Stance and apex state of an already-planned step, expressed in some
/// frame: foot placement, apex CoM position, apex CoM velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StanceState<T> {
    pub foot: Vec2<T>,
    pub apex_pos: Vec2<T>,
    pub apex_vel: Vec2<T>,
}

impl<T: Real> StanceState<T> {
    /// Re-express in the global frame: positions take the full SE(2)
    /// transform, the velocity rotates only.
    pub fn to_global(&self, frame: &Pose2<T>) -> Self {
        Self {
            foot: frame.to_global(self.foot),
            apex_pos: frame.to_global(self.apex_pos),
            apex_vel: frame.vec_to_global(self.apex_vel),
        }
    }

    /// Re-express a global-frame state in `frame` coordinates.
    pub fn to_local(&self, frame: &Pose2<T>) -> Self {
        Self {
            foot: frame.to_local(self.foot),
            apex_pos: frame.to_local(self.apex_pos),
            apex_vel: frame.vec_to_local(self.apex_vel),
        }
    }
}

/// The locomotion parameter vector of one step: the step-solver input and
/// output plus the carried apex state, expressed in the parent node's local
/// frame (the root's is expressed in the global frame).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocomotionParams<T> {
    /// Foot placement (p_x, p_y).
    pub foot: Vec2<T>,
    /// CoM position at the apex of the step; its x equals foot.x in the
    /// frame this vector was produced in.
    pub apex_pos: Vec2<T>,
    /// CoM velocity at the apex.
    pub apex_vel: Vec2<T>,
    /// Time from the parent apex to the stance switch.
    pub t_switch: T,
    /// Time from the stance switch to this step's apex.
    pub t_apex: T,
}

impl<T: Real> LocomotionParams<T> {
    pub fn from_step(input: &StepInput<T>, output: &StepOutput<T>) -> Self {
        Self {
            foot: Vec2::new(input.foot_x, output.foot_y),
            apex_pos: Vec2::new(input.foot_x, output.apex_y),
            apex_vel: Vec2::new(input.apex_vel_x, input.apex_vel_y),
            t_switch: output.t_switch,
            t_apex: output.t_apex,
        }
    }

    pub fn stance(&self) -> StanceState<T> {
        StanceState {
            foot: self.foot,
            apex_pos: self.apex_pos,
            apex_vel: self.apex_vel,
        }
    }

    pub fn step_duration(&self) -> T {
        self.t_switch + self.t_apex
    }

    pub fn is_finite(&self) -> bool {
        self.foot.is_finite()
            && self.apex_pos.is_finite()
            && self.apex_vel.is_finite()
            && self.t_switch.is_finite()
            && self.t_apex.is_finite()
    }
}

/// Solve one step: given the parent stance state (in the parent's own local
/// frame) and the input triple for the next step, compute the switch state,
/// both timings, the lateral foot placement and the lateral apex position.
///
/// The natural frequency is evaluated at the parent stance foothold and used
/// uniformly for the whole step; on flat ground it is the same everywhere.
pub fn psp_step<T: Real>(
    stance: &StanceState<T>,
    input: &StepInput<T>,
    params: &LipmParams<T>,
) -> Result<StepOutput<T>, PspError> {
    if input.foot_x <= stance.foot.x || input.apex_vel_x <= T::zero() {
        return Err(PspError::NotForward);
    }
    let omega = params.omega(stance.foot.x)?;

    let sagittal1 = PendulumState::new(stance.apex_pos.x, stance.apex_vel.x);
    let sagittal2 = PendulumState::new(input.foot_x, input.apex_vel_x);

    let x_switch = switching_position(stance.foot.x, &sagittal1, input.foot_x, &sagittal2, omega)?;
    let v_switch = velocity_on_orbit(
        x_switch,
        &sagittal1,
        stance.foot.x,
        omega,
        VelSign::Positive,
    )?;
    if v_switch <= T::zero() {
        return Err(PspError::NotForward);
    }
    let switch = PendulumState::new(x_switch, v_switch);

    let t_switch = time_to_state(&sagittal1, stance.foot.x, omega, &switch)?;
    if t_switch < T::zero() {
        return Err(PspError::NegativeSwitchTime);
    }
    // On the next orbit the switch precedes the apex, so the time from the
    // apex back to the switch is negative; its magnitude is t_apex.
    let t_back = time_to_state(&sagittal2, input.foot_x, omega, &switch)?;
    if t_back >= T::zero() {
        return Err(PspError::NonPositiveApexTime);
    }
    let t_apex = -t_back;

    let lateral1 = PendulumState::new(stance.apex_pos.y, stance.apex_vel.y);
    let y_switch = state_at(&lateral1, stance.foot.y, omega, t_switch);
    let foot_y = find_py(&y_switch, input.apex_vel_y, t_apex, omega)?;
    let apex_lateral = state_at(&y_switch, foot_y, omega, t_apex);

    Ok(StepOutput {
        t_switch,
        t_apex,
        foot_y,
        apex_y: apex_lateral.pos,
    })
}
