//! Per-axis adaptive fuzzy controllers.
//!
//! Each axis (roll, yaw, pitch) runs a two-input fuzzy inference system over
//! its tracking error and error rate: seven Gaussian membership functions per
//! input paired diagonally into seven rules, centroid-normalized firing
//! strengths, and a singleton consequent vector `W` that is adapted online.
//! The adaptation is driven by the filtered error `B^T P E`, where `P` solves
//! the Lyapunov equation of the target error dynamics.

use crate::decoupling::{self, VirtualInputs};
use crate::plant::{ControlInputs, HelicopterState, ModelParams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const RULE_COUNT: usize = 7;

/// Gaussian membership function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMF {
    pub center: f64,
    pub sigma: f64,
}

impl GaussianMF {
    /// Membership grade `exp(-(x-c)^2 / (2 sigma^2))`, in (0, 1].
    pub fn value(&self, x: f64) -> f64 {
        let z = (x - self.center) / self.sigma;
        (-0.5 * z * z).exp()
    }
}

/// Seven membership functions per input, labeled NL, NM, NS, Z, PS, PM, PL,
/// with odd-symmetric centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleBase {
    pub mfs_error: [GaussianMF; RULE_COUNT],
    pub mfs_error_rate: [GaussianMF; RULE_COUNT],
}

#[derive(Debug, Error, PartialEq)]
pub enum FuzzyError {
    #[error("membership sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("negative-side center magnitudes must be finite, got {0}")]
    NonFiniteCenter(f64),
}

/// Odd-symmetric center set from three magnitudes: the largest magnitude maps
/// to NL/PL, the smallest to NS/PS, and Z sits at zero.
fn symmetric_centers(magnitudes: [f64; 3], sigma: f64) -> [GaussianMF; RULE_COUNT] {
    let mut mags = magnitudes.map(f64::abs);
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let centers = [-mags[0], -mags[1], -mags[2], 0.0, mags[2], mags[1], mags[0]];
    centers.map(|center| GaussianMF { center, sigma })
}

impl RuleBase {
    /// Build from the three free negative-side magnitudes per input.
    pub fn from_negative_magnitudes(
        error_mags: [f64; 3],
        rate_mags: [f64; 3],
        sigma: f64,
    ) -> Result<Self, FuzzyError> {
        if !(sigma > 0.0) {
            return Err(FuzzyError::NonPositiveSigma(sigma));
        }
        for m in error_mags.iter().chain(rate_mags.iter()) {
            if !m.is_finite() {
                return Err(FuzzyError::NonFiniteCenter(*m));
            }
        }
        Ok(Self {
            mfs_error: symmetric_centers(error_mags, sigma),
            mfs_error_rate: symmetric_centers(rate_mags, sigma),
        })
    }

    /// The three negative-side magnitudes (|NL|, |NM|, |NS|) of the error input.
    pub fn error_magnitudes(&self) -> [f64; 3] {
        [
            -self.mfs_error[0].center,
            -self.mfs_error[1].center,
            -self.mfs_error[2].center,
        ]
    }

    /// The three negative-side magnitudes of the error-rate input.
    pub fn rate_magnitudes(&self) -> [f64; 3] {
        [
            -self.mfs_error_rate[0].center,
            -self.mfs_error_rate[1].center,
            -self.mfs_error_rate[2].center,
        ]
    }
}

/// Tracking error and its rate for one axis (actual minus desired).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrackingError {
    pub e: f64,
    pub e_dot: f64,
}

/// Rule firing strengths: product of the two input grades per diagonal pair.
pub fn firing_strengths(rb: &RuleBase, err: &TrackingError) -> [f64; RULE_COUNT] {
    let mut f = [0.0; RULE_COUNT];
    for i in 0..RULE_COUNT {
        f[i] = rb.mfs_error[i].value(err.e) * rb.mfs_error_rate[i].value(err.e_dot);
    }
    f
}

/// Centroid normalization: each component in [0, 1], summing to one.
///
/// Gaussians are positive in exact arithmetic, but far from all centers every
/// strength can underflow to zero; the degenerate case falls back to uniform.
pub fn phi_hat(f: &[f64; RULE_COUNT]) -> [f64; RULE_COUNT] {
    let sum: f64 = f.iter().sum();
    if sum <= 0.0 {
        return [1.0 / RULE_COUNT as f64; RULE_COUNT];
    }
    let mut phi = *f;
    for p in &mut phi {
        *p /= sum;
    }
    phi
}

/// Symmetric 2x2 matrix, stored by its three distinct entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymMat2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl SymMat2 {
    pub const IDENTITY: Self = Self {
        a11: 1.0,
        a12: 0.0,
        a22: 1.0,
    };

    pub fn diagonal(a11: f64, a22: f64) -> Self {
        Self { a11, a12: 0.0, a22 }
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a11 > 0.0 && self.a11 * self.a22 - self.a12 * self.a12 > 0.0
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LyapunovError {
    #[error("target dynamics require kp > 0 and kd > 0, got kp={kp}, kd={kd}")]
    NotHurwitz { kp: f64, kd: f64 },
    #[error("Q must be symmetric positive definite")]
    QNotPositiveDefinite,
}

/// Solve `A^T P + P A = -Q` for the companion matrix `A = [[0, 1], [-kp, -kd]]`.
///
/// The three scalar equations have the closed form
/// `p12 = q11 / (2 kp)`, `p22 = (p12 + q22/2) / kd`,
/// `p11 = kd p12 + kp p22 - q12`.
pub fn solve_lyapunov(kp: f64, kd: f64, q: &SymMat2) -> Result<SymMat2, LyapunovError> {
    if !(kp > 0.0 && kd > 0.0) {
        return Err(LyapunovError::NotHurwitz { kp, kd });
    }
    if !q.is_positive_definite() {
        return Err(LyapunovError::QNotPositiveDefinite);
    }
    let p12 = q.a11 / (2.0 * kp);
    let p22 = (p12 + q.a22 / 2.0) / kd;
    let p11 = kd * p12 + kp * p22 - q.a12;
    Ok(SymMat2 {
        a11: p11,
        a12: p12,
        a22: p22,
    })
}

/// Max-abs entry of `A^T P + P A + Q`; zero for an exact solution.
pub fn lyapunov_residual(kp: f64, kd: f64, p: &SymMat2, q: &SymMat2) -> f64 {
    // A^T P + P A for A = [[0,1],[-kp,-kd]]
    let r11 = -2.0 * kp * p.a12 + q.a11;
    let r12 = p.a11 - kd * p.a12 - kp * p.a22 + q.a12;
    let r22 = 2.0 * (p.a12 - kd * p.a22) + q.a22;
    r11.abs().max(r12.abs()).max(r22.abs())
}

/// One axis controller: rule base, consequent weights, adaptation gains, and
/// the Lyapunov matrix of its target error dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveFuzzyLoop {
    pub rulebase: RuleBase,
    pub weights: [f64; RULE_COUNT],
    pub gamma: [f64; RULE_COUNT],
    pub kp: f64,
    pub kd: f64,
    pub eta_hat: f64,
    pub lyap_q: SymMat2,
    pub lyap_p: SymMat2,
    pub output_gain: f64,
}

impl AdaptiveFuzzyLoop {
    pub fn new(
        rulebase: RuleBase,
        gamma: [f64; RULE_COUNT],
        kp: f64,
        kd: f64,
        eta_hat: f64,
        output_gain: f64,
        q: SymMat2,
    ) -> Result<Self, LyapunovError> {
        let lyap_p = solve_lyapunov(kp, kd, &q)?;
        Ok(Self {
            rulebase,
            weights: [0.0; RULE_COUNT],
            gamma,
            kp,
            kd,
            eta_hat,
            lyap_q: q,
            lyap_p,
            output_gain,
        })
    }

    /// Crisp output: `output_gain * phi^T W`.
    pub fn control_output(&self, phi: &[f64; RULE_COUNT]) -> f64 {
        let mut acc = 0.0;
        for i in 0..RULE_COUNT {
            acc += phi[i] * self.weights[i];
        }
        self.output_gain * acc
    }

    /// Explicit-Euler step of the adaptation law `W' = -Gamma phi B^T P E`
    /// with `B = (0, eta)^T`, so `B^T P E = eta (p12 e + p22 e_dot)`.
    pub fn adapt_weights(&mut self, phi: &[f64; RULE_COUNT], err: &TrackingError, dt: f64) {
        let filtered = self.eta_hat * (self.lyap_p.a12 * err.e + self.lyap_p.a22 * err.e_dot);
        for i in 0..RULE_COUNT {
            self.weights[i] -= dt * self.gamma[i] * phi[i] * filtered;
        }
    }

    pub fn weights_finite(&self) -> bool {
        self.weights.iter().all(|w| w.is_finite())
    }
}

/// Control-channel gain estimates `(eta_roll, eta_yaw, eta_pitch)` of the
/// decoupled model: `L_a/J_roll`, `L_a/J_yaw`, `L_h/J_pitch`.
pub fn eta_values(p: &ModelParams) -> (f64, f64, f64) {
    (p.l_a / p.j_roll, p.l_a / p.j_yaw, p.l_h / p.j_pitch)
}

/// Reference for the two outer channels at one control instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AttitudeTarget {
    pub roll: f64,
    pub roll_rate: f64,
    pub yaw: f64,
    pub yaw_rate: f64,
}

/// Everything one control step produces, for logging and metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlFrame {
    pub inputs: ControlInputs,
    pub virtual_inputs: VirtualInputs,
    pub desired_pitch: f64,
    pub roll_error: TrackingError,
    pub pitch_error: TrackingError,
    pub yaw_error: TrackingError,
}

#[derive(Debug, Error, PartialEq)]
pub enum ControlError {
    #[error("controller produced a non-finite signal (weights diverged)")]
    NonFinite,
}

/// Three adaptive loops wired through the decoupling layer.
///
/// The pitch reference rate is obtained by backward difference with one step
/// of memory; the first step uses zero.
#[derive(Debug, Clone)]
pub struct FuzzyAttitudeController {
    pub roll: AdaptiveFuzzyLoop,
    pub yaw: AdaptiveFuzzyLoop,
    pub pitch: AdaptiveFuzzyLoop,
    prev_desired_pitch: Option<f64>,
}

impl FuzzyAttitudeController {
    pub fn new(roll: AdaptiveFuzzyLoop, yaw: AdaptiveFuzzyLoop, pitch: AdaptiveFuzzyLoop) -> Self {
        Self {
            roll,
            yaw,
            pitch,
            prev_desired_pitch: None,
        }
    }

    /// One control instant: outer-loop outputs, decoupling, inner-loop output,
    /// then weight adaptation on all three loops.
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
        let phi_roll = phi_hat(&firing_strengths(&self.roll.rulebase, &roll_error));
        let phi_yaw = phi_hat(&firing_strengths(&self.yaw.rulebase, &yaw_error));
        let v = VirtualInputs {
            v1: self.roll.control_output(&phi_roll),
            v2: self.yaw.control_output(&phi_yaw),
        };
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
        let phi_pitch = phi_hat(&firing_strengths(&self.pitch.rulebase, &pitch_error));
        let u2 = self.pitch.control_output(&phi_pitch);

        self.roll.adapt_weights(&phi_roll, &roll_error, dt);
        self.yaw.adapt_weights(&phi_yaw, &yaw_error, dt);
        self.pitch.adapt_weights(&phi_pitch, &pitch_error, dt);

        if !(u1.is_finite() && u2.is_finite())
            || !self.roll.weights_finite()
            || !self.yaw.weights_finite()
            || !self.pitch.weights_finite()
        {
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
