//! Virtual-input transformation for the underactuated roll/yaw channels.
//!
//! The collective force `u1` drives both roll (through `cos(pitch)`) and yaw
//! (through `cos(roll) sin(pitch)`). Treating `v1 = cos(pitch) u1` and
//! `v2 = cos(roll) sin(pitch) u1` as independent virtual forces decouples the
//! two channels; the pitch angle that realizes a requested `(v1, v2)` pair
//! becomes the inner-loop reference.

use crate::plant::PITCH_LIMIT;
use serde::{Deserialize, Serialize};

/// Virtual forces requested by the roll (`v1`) and yaw (`v2`) controllers.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VirtualInputs {
    pub v1: f64,
    pub v2: f64,
}

/// Forward map: the virtual forces realized by `u1` at the given attitude.
pub fn actual_to_virtual(u1: f64, pitch: f64, roll: f64) -> VirtualInputs {
    VirtualInputs {
        v1: pitch.cos() * u1,
        v2: roll.cos() * pitch.sin() * u1,
    }
}

/// Pitch reference realizing the requested virtual-force ratio.
///
/// Uses the principal branch `atan(v2 / (cos(roll) v1))`, which keeps the
/// reference in (-90, 90) degrees for either sign of `v1`; combined with the
/// sign convention of [`collective_input`] the pair reproduces `(v1, v2)`
/// exactly. The result is clamped to the +/-45 degree pitch envelope, and the
/// all-zero demand maps to zero.
pub fn desired_pitch(v: &VirtualInputs, roll: f64) -> f64 {
    let denom = roll.cos() * v.v1;
    let raw = if denom == 0.0 {
        if v.v2 == 0.0 {
            0.0
        } else {
            std::f64::consts::FRAC_PI_2.copysign(v.v2)
        }
    } else {
        (v.v2 / denom).atan()
    };
    raw.clamp(-PITCH_LIMIT, PITCH_LIMIT)
}

/// Collective force realizing the requested virtual forces.
///
/// `|u1| = sqrt(v1^2 + (v2 / cos(roll))^2)`, signed by the lift channel `v1`
/// when nonzero, else by `v2`, else zero.
pub fn collective_input(v: &VirtualInputs, roll: f64) -> f64 {
    let magnitude = (v.v1 * v.v1 + (v.v2 / roll.cos()).powi(2)).sqrt();
    if v.v1 != 0.0 {
        magnitude.copysign(v.v1)
    } else if v.v2 != 0.0 {
        magnitude.copysign(v.v2)
    } else {
        0.0
    }
}
