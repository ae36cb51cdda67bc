//! Rigid-body dynamics of the 3-DOF helicopter.
//!
//! The apparatus rotates freely about the roll (elevation), pitch, and yaw
//! (travel) axes and is driven by two propeller forces, represented here
//! through their sum `u1` and difference `u2`. Roll and pitch travel is
//! mechanically limited; the limits are applied as saturations after each
//! integration step.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Pitch stop, +/-45 degrees.
pub const PITCH_LIMIT: f64 = 45.0 * std::f64::consts::PI / 180.0;
/// Lower roll stop, -27.5 degrees.
pub const ROLL_MIN: f64 = -27.5 * std::f64::consts::PI / 180.0;
/// Upper roll stop, +30 degrees.
pub const ROLL_MAX: f64 = 30.0 * std::f64::consts::PI / 180.0;

/// Physical constants of the bench-top helicopter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Mass of the helicopter body (kg).
    pub m_heli: f64,
    /// Mass of the counterweight (kg).
    pub m_counter: f64,
    /// Distance between the roll axis and the center of mass (m).
    pub l_a: f64,
    /// Distance between the lifting axis and the counterweight (m).
    pub l_w: f64,
    /// Distance between the pitch axis and each motor (m).
    pub l_h: f64,
    /// Moment of inertia about the roll axis (kg m^2).
    pub j_roll: f64,
    /// Moment of inertia about the pitch axis (kg m^2).
    pub j_pitch: f64,
    /// Moment of inertia about the yaw axis (kg m^2).
    pub j_yaw: f64,
    /// Gravitational acceleration (m/s^2).
    pub g: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            m_heli: 1.426,
            m_counter: 1.870,
            l_a: 0.660,
            l_w: 0.470,
            l_h: 0.178,
            j_roll: 1.0348,
            j_pitch: 0.0451,
            j_yaw: 1.0348,
            g: 9.81,
        }
    }
}

impl ModelParams {
    /// All constants must be strictly positive.
    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("m_heli", self.m_heli),
            ("m_counter", self.m_counter),
            ("l_a", self.l_a),
            ("l_w", self.l_w),
            ("l_h", self.l_h),
            ("j_roll", self.j_roll),
            ("j_pitch", self.j_pitch),
            ("j_yaw", self.j_yaw),
            ("g", self.g),
        ];
        for (name, value) in fields {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ModelError::NonPositiveParam { name, value });
            }
        }
        Ok(())
    }

    /// Plant with the helicopter mass scaled by `scale`, everything else nominal.
    pub fn with_mass_scale(&self, scale: f64) -> Self {
        Self {
            m_heli: self.m_heli * scale,
            ..*self
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("model parameter {name} must be strictly positive, got {value}")]
    NonPositiveParam { name: &'static str, value: f64 },
}

/// The six-dimensional state: three angles and their rates, in rad and rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HelicopterState {
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
    pub roll_rate: f64,
    pub pitch_rate: f64,
    pub yaw_rate: f64,
}

impl HelicopterState {
    pub fn is_finite(&self) -> bool {
        self.roll.is_finite()
            && self.pitch.is_finite()
            && self.yaw.is_finite()
            && self.roll_rate.is_finite()
            && self.pitch_rate.is_finite()
            && self.yaw_rate.is_finite()
    }
}

/// Propeller force sum (`u1`) and difference (`u2`), in N.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInputs {
    pub u1: f64,
    pub u2: f64,
}

/// Time derivative of [`HelicopterState`].
#[derive(Debug, Clone, Copy, Default)]
pub struct StateDerivative {
    pub roll_rate: f64,
    pub pitch_rate: f64,
    pub yaw_rate: f64,
    pub roll_acc: f64,
    pub pitch_acc: f64,
    pub yaw_acc: f64,
}

/// Gravity torque about the roll axis: `g (M_h L_a - M_w L_w) cos(roll)`.
pub fn gravity_roll_torque(p: &ModelParams, roll: f64) -> f64 {
    p.g * (p.m_heli * p.l_a - p.m_counter * p.l_w) * roll.cos()
}

/// Exact state derivative of the coupled nonlinear model.
pub fn state_derivative(s: &HelicopterState, u: &ControlInputs, p: &ModelParams) -> StateDerivative {
    StateDerivative {
        roll_rate: s.roll_rate,
        pitch_rate: s.pitch_rate,
        yaw_rate: s.yaw_rate,
        roll_acc: (gravity_roll_torque(p, s.roll) + p.l_a * s.pitch.cos() * u.u1) / p.j_roll,
        pitch_acc: p.l_h * u.u2 / p.j_pitch,
        yaw_acc: p.l_a * s.roll.cos() * s.pitch.sin() * u.u1 / p.j_yaw,
    }
}

fn advance(s: &HelicopterState, d: &StateDerivative, h: f64) -> HelicopterState {
    HelicopterState {
        roll: s.roll + h * d.roll_rate,
        pitch: s.pitch + h * d.pitch_rate,
        yaw: s.yaw + h * d.yaw_rate,
        roll_rate: s.roll_rate + h * d.roll_acc,
        pitch_rate: s.pitch_rate + h * d.pitch_acc,
        yaw_rate: s.yaw_rate + h * d.yaw_acc,
    }
}

/// One classical fourth-order Runge-Kutta step of an arbitrary autonomous
/// derivative field. Inputs are held constant over the step by the caller.
pub fn rk4_step_with<F>(f: F, s: &HelicopterState, dt: f64) -> HelicopterState
where
    F: Fn(&HelicopterState) -> StateDerivative,
{
    let k1 = f(s);
    let k2 = f(&advance(s, &k1, dt / 2.0));
    let k3 = f(&advance(s, &k2, dt / 2.0));
    let k4 = f(&advance(s, &k3, dt));
    HelicopterState {
        roll: s.roll + dt / 6.0 * (k1.roll_rate + 2.0 * k2.roll_rate + 2.0 * k3.roll_rate + k4.roll_rate),
        pitch: s.pitch
            + dt / 6.0 * (k1.pitch_rate + 2.0 * k2.pitch_rate + 2.0 * k3.pitch_rate + k4.pitch_rate),
        yaw: s.yaw + dt / 6.0 * (k1.yaw_rate + 2.0 * k2.yaw_rate + 2.0 * k3.yaw_rate + k4.yaw_rate),
        roll_rate: s.roll_rate
            + dt / 6.0 * (k1.roll_acc + 2.0 * k2.roll_acc + 2.0 * k3.roll_acc + k4.roll_acc),
        pitch_rate: s.pitch_rate
            + dt / 6.0 * (k1.pitch_acc + 2.0 * k2.pitch_acc + 2.0 * k3.pitch_acc + k4.pitch_acc),
        yaw_rate: s.yaw_rate
            + dt / 6.0 * (k1.yaw_acc + 2.0 * k2.yaw_acc + 2.0 * k3.yaw_acc + k4.yaw_acc),
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum StepError {
    #[error("integration step produced a non-finite state")]
    NonFiniteState,
    #[error("step size must be positive, got {0}")]
    NonPositiveDt(f64),
}

/// One RK4 step with `u` held constant, without the travel stops.
pub fn step_free(
    s: &HelicopterState,
    u: &ControlInputs,
    p: &ModelParams,
    dt: f64,
) -> Result<HelicopterState, StepError> {
    if !(dt > 0.0) {
        return Err(StepError::NonPositiveDt(dt));
    }
    let next = rk4_step_with(|s| state_derivative(s, u, p), s, dt);
    if next.is_finite() {
        Ok(next)
    } else {
        Err(StepError::NonFiniteState)
    }
}

/// One RK4 step with `u` held constant, followed by the angle saturations.
pub fn step(
    s: &HelicopterState,
    u: &ControlInputs,
    p: &ModelParams,
    dt: f64,
) -> Result<HelicopterState, StepError> {
    step_free(s, u, p, dt).map(|next| clamp_angles(&next))
}

/// Apply the roll and pitch travel stops. When a stop engages, the rate is
/// zeroed if it still points out of range; yaw is unconstrained.
pub fn clamp_angles(s: &HelicopterState) -> HelicopterState {
    let mut out = *s;
    if out.pitch > PITCH_LIMIT {
        out.pitch = PITCH_LIMIT;
        if out.pitch_rate > 0.0 {
            out.pitch_rate = 0.0;
        }
    } else if out.pitch < -PITCH_LIMIT {
        out.pitch = -PITCH_LIMIT;
        if out.pitch_rate < 0.0 {
            out.pitch_rate = 0.0;
        }
    }
    if out.roll > ROLL_MAX {
        out.roll = ROLL_MAX;
        if out.roll_rate > 0.0 {
            out.roll_rate = 0.0;
        }
    } else if out.roll < ROLL_MIN {
        out.roll = ROLL_MIN;
        if out.roll_rate < 0.0 {
            out.roll_rate = 0.0;
        }
    }
    out
}
