//! Classical PID baseline, running through the same decoupling layer as the
//! adaptive controller.

use crate::decoupling::{self, VirtualInputs};
use crate::fuzzy::{AttitudeTarget, ControlError, ControlFrame, TrackingError};
use crate::plant::{ControlInputs, HelicopterState};
use serde::{Deserialize, Serialize};

/// Parallel-form PID gains with a clamping anti-windup limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub integral_limit: f64,
}

impl PidGains {
    pub fn validate(&self) -> bool {
        self.kp >= 0.0 && self.ki >= 0.0 && self.kd >= 0.0 && self.integral_limit > 0.0
    }
}

/// One PID evaluation: `u = kp e + ki clamp(I, +/-limit) + kd e_dot`, with the
/// integral advanced by the trapezoid rule. The left endpoint of the trapezoid
/// is reconstructed from the error rate, so a single scalar carries the state.
pub fn pid_step(
    gains: &PidGains,
    e: f64,
    e_dot: f64,
    integral_state: f64,
    dt: f64,
) -> (f64, f64) {
    let prev_e = e - e_dot * dt;
    let integral = (integral_state + dt * (e + prev_e) / 2.0)
        .clamp(-gains.integral_limit, gains.integral_limit);
    let u = gains.kp * e + gains.ki * integral + gains.kd * e_dot;
    (u, integral)
}

/// Per-axis gain set for the three-channel baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidConfig {
    pub roll: PidGains,
    pub yaw: PidGains,
    pub pitch: PidGains,
}

impl Default for PidConfig {
    /// Desk-tuned against the nominal scenario: steady-state roll/yaw error
    /// under 0.02 rad with settling slower than the tuned fuzzy controller.
    fn default() -> Self {
        Self {
            roll: PidGains {
                kp: 14.0,
                ki: 4.0,
                kd: 9.0,
                integral_limit: 2.0,
            },
            yaw: PidGains {
                kp: 9.0,
                ki: 1.5,
                kd: 10.0,
                integral_limit: 2.0,
            },
            pitch: PidGains {
                kp: 18.0,
                ki: 2.0,
                kd: 4.0,
                integral_limit: 2.0,
            },
        }
    }
}

/// PID attitude controller mirroring the adaptive structure: outer roll/yaw
/// loops produce virtual forces, the decoupling derives the pitch reference
/// and collective force, and an inner PID tracks the pitch reference.
///
/// Each PID acts on the negated tracking error (reference minus measurement).
#[derive(Debug, Clone)]
pub struct PidAttitudeController {
    pub config: PidConfig,
    roll_integral: f64,
    yaw_integral: f64,
    pitch_integral: f64,
    prev_desired_pitch: Option<f64>,
}

impl PidAttitudeController {
    pub fn new(config: PidConfig) -> Self {
        Self {
            config,
            roll_integral: 0.0,
            yaw_integral: 0.0,
            pitch_integral: 0.0,
            prev_desired_pitch: None,
        }
    }

    pub fn step(
        &mut self,
        state: &HelicopterState,
        target: &AttitudeTarget,
        dt: f64,
    ) -> Result<ControlFrame, ControlError> {
        let roll_error = TrackingError {
            e: state.roll - target.roll,
            e_dot: state.roll_rate - target.roll_rate,
        };
        let yaw_error = TrackingError {
            e: state.yaw - target.yaw,
            e_dot: state.yaw_rate - target.yaw_rate,
        };
        let (v1, roll_integral) = pid_step(
            &self.config.roll,
            -roll_error.e,
            -roll_error.e_dot,
            self.roll_integral,
            dt,
        );
        let (v2, yaw_integral) = pid_step(
            &self.config.yaw,
            -yaw_error.e,
            -yaw_error.e_dot,
            self.yaw_integral,
            dt,
        );
        self.roll_integral = roll_integral;
        self.yaw_integral = yaw_integral;

        let v = VirtualInputs { v1, v2 };
        let desired_pitch = decoupling::desired_pitch(&v, state.roll);
        let u1 = decoupling::collective_input(&v, state.roll);
        let desired_pitch_rate = match self.prev_desired_pitch {
            Some(prev) => (desired_pitch - prev) / dt,
            None => 0.0,
        };
        self.prev_desired_pitch = Some(desired_pitch);
        let pitch_error = TrackingError {
            e: state.pitch - desired_pitch,
            e_dot: state.pitch_rate - desired_pitch_rate,
        };
        let (u2, pitch_integral) = pid_step(
            &self.config.pitch,
            -pitch_error.e,
            -pitch_error.e_dot,
            self.pitch_integral,
            dt,
        );
        self.pitch_integral = pitch_integral;

        if !(u1.is_finite() && u2.is_finite()) {
            return Err(ControlError::NonFinite);
        }
        Ok(ControlFrame {
            inputs: ControlInputs { u1, u2 },
            virtual_inputs: v,
            desired_pitch,
            roll_error,
            pitch_error,
            yaw_error,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gains(kp: f64, ki: f64, kd: f64) -> PidGains {
        PidGains {
            kp,
            ki,
            kd,
            integral_limit: 10.0,
        }
    }

    #[test]
    fn zero_input_zero_output() {
        let (u, i) = pid_step(&gains(2.0, 1.0, 0.5), 0.0, 0.0, 0.0, 1e-3);
        assert_eq!(u, 0.0);
        assert_eq!(i, 0.0);
    }

    #[test]
    fn proportional_only() {
        let (u, _) = pid_step(&gains(2.0, 0.0, 0.0), 1.5, 0.0, 0.0, 1e-3);
        assert_relative_eq!(u, 3.0, epsilon = 1e-15);
    }

    #[test]
    fn trapezoid_integral_of_constant_error() {
        let g = gains(0.0, 1.0, 0.0);
        let dt = 1e-3;
        let mut integral = 0.0;
        let mut u = 0.0;
        for _ in 0..1000 {
            let r = pid_step(&g, 1.0, 0.0, integral, dt);
            u = r.0;
            integral = r.1;
        }
        assert_relative_eq!(u, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn trapezoid_integral_of_ramp() {
        // e(t) = t sampled at step ends; exact integral over [0,1] is 0.5
        let g = gains(0.0, 1.0, 0.0);
        let dt = 1e-3;
        let mut integral = 0.0;
        for k in 1..=1000 {
            let t = k as f64 * dt;
            integral = pid_step(&g, t, 1.0, integral, dt).1;
        }
        assert_relative_eq!(integral, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn zero_gains_zero_output_controller() {
        let zero = PidGains {
            kp: 0.0,
            ki: 0.0,
            kd: 0.0,
            integral_limit: 1.0,
        };
        let mut ctrl = PidAttitudeController::new(PidConfig {
            roll: zero,
            yaw: zero,
            pitch: zero,
        });
        let state = HelicopterState {
            roll: 0.3,
            yaw: -0.4,
            ..Default::default()
        };
        let frame = ctrl.step(&state, &AttitudeTarget::default(), 1e-3).unwrap();
        assert_eq!(frame.inputs, ControlInputs::default());
    }

    proptest! {
        /// Clamping anti-windup: the integral never exceeds the limit.
        #[test]
        fn integral_stays_within_limit(
            errors in proptest::collection::vec(-5.0f64..5.0, 1..200),
            limit in 0.1f64..3.0,
        ) {
            let g = PidGains { kp: 1.0, ki: 2.0, kd: 0.1, integral_limit: limit };
            let mut integral = 0.0;
            for e in errors {
                integral = pid_step(&g, e, 0.0, integral, 0.05).1;
                prop_assert!(integral.abs() <= limit + 1e-12);
            }
        }
    }
}
