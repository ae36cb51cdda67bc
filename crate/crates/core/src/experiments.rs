//! Scenario definitions, the closed-loop runner, tracking metrics, and the
//! 25-parameter encoding that the optimizer tunes.

use crate::fuzzy::{
    eta_values, AdaptiveFuzzyLoop, AttitudeTarget, ControlFrame, FuzzyAttitudeController,
    LyapunovError, RuleBase, SymMat2,
};
use crate::pid::{PidAttitudeController, PidConfig};
use crate::plant::{self, HelicopterState, ModelParams};
use crate::swarm::Bounds;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Sigmoid reference for both the roll and yaw channels.
pub fn desired_trajectory(t: f64) -> f64 {
    1.0 / (1.0 + (-2.5 * (t + 2.0)).exp())
}

/// Analytic rate of the reference: `2.5 r (1 - r)`.
pub fn desired_trajectory_rate(t: f64) -> f64 {
    let r = desired_trajectory(t);
    2.5 * r * (1.0 - r)
}

/// Axis a step disturbance acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Roll,
    Pitch,
    Yaw,
}

/// Constant angular-acceleration offset applied from `onset` onward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disturbance {
    pub axis: Axis,
    pub magnitude: f64,
    pub onset: f64,
}

/// One experiment configuration.
///
/// `mass_scale` multiplies the helicopter mass in the plant only; the
/// controller keeps nominal constants. The roll/pitch travel stops are
/// disabled by default: the reference trajectory deliberately exceeds the
/// hardware envelope, so the tracking experiments run the unconstrained
/// model (`enforce_angle_limits` turns the stops back on).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub label: String,
    pub mass_scale: f64,
    pub disturbances: Vec<Disturbance>,
    pub horizon: f64,
    pub dt: f64,
    pub enforce_angle_limits: bool,
}

impl Scenario {
    pub fn nominal() -> Self {
        Self {
            label: "nominal".into(),
            mass_scale: 1.0,
            disturbances: Vec::new(),
            horizon: 20.0,
            dt: 1e-3,
            enforce_angle_limits: false,
        }
    }

    pub fn mass_scaled(scale: f64) -> Self {
        Self {
            label: format!("mass-{scale}"),
            mass_scale: scale,
            ..Self::nominal()
        }
    }

    /// Step disturbances of 1, 1, and 0.1 rad/s^2 on roll, pitch, and yaw at
    /// 12, 14, and 16 seconds.
    pub fn disturbed() -> Self {
        Self {
            label: "disturbance".into(),
            disturbances: vec![
                Disturbance {
                    axis: Axis::Roll,
                    magnitude: 1.0,
                    onset: 12.0,
                },
                Disturbance {
                    axis: Axis::Pitch,
                    magnitude: 1.0,
                    onset: 14.0,
                },
                Disturbance {
                    axis: Axis::Yaw,
                    magnitude: 0.1,
                    onset: 16.0,
                },
            ],
            ..Self::nominal()
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.horizon > 0.0) {
            return Err(ScenarioError::BadHorizon(self.horizon));
        }
        if !(self.dt > 0.0) {
            return Err(ScenarioError::BadDt(self.dt));
        }
        for d in &self.disturbances {
            if d.onset >= self.horizon {
                return Err(ScenarioError::OnsetPastHorizon {
                    onset: d.onset,
                    horizon: self.horizon,
                });
            }
        }
        Ok(())
    }

    fn accel_bias(&self, t: f64) -> [f64; 3] {
        let mut bias = [0.0; 3];
        for d in &self.disturbances {
            if t >= d.onset {
                match d.axis {
                    Axis::Roll => bias[0] += d.magnitude,
                    Axis::Pitch => bias[1] += d.magnitude,
                    Axis::Yaw => bias[2] += d.magnitude,
                }
            }
        }
        bias
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("horizon must be positive, got {0}")]
    BadHorizon(f64),
    #[error("dt must be positive, got {0}")]
    BadDt(f64),
    #[error("disturbance onset {onset} not before horizon {horizon}")]
    OnsetPastHorizon { onset: f64, horizon: f64 },
}

pub const PARAM_DIM: usize = 25;

/// Flat parameter layout tuned by the optimizer:
/// `[K_roll, K_yaw, K_pitch, K_p, K_d, Gamma_rollyaw(7), Gamma_pitch(7),
///   error-center magnitudes (3), rate-center magnitudes (3)]`.
///
/// The roll and yaw loops share one adaptation-gain diagonal. Center
/// magnitudes are the three free negative-side values per input; the zero
/// center and the mirrored positive side are not free parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector(pub [f64; PARAM_DIM]);

/// Index ranges of the flat layout.
pub mod layout {
    pub const GAIN_ROLL: usize = 0;
    pub const GAIN_YAW: usize = 1;
    pub const GAIN_PITCH: usize = 2;
    pub const KP: usize = 3;
    pub const KD: usize = 4;
    pub const GAMMA_ROLLYAW: std::ops::Range<usize> = 5..12;
    pub const GAMMA_PITCH: std::ops::Range<usize> = 12..19;
    pub const ERROR_CENTERS: std::ops::Range<usize> = 19..22;
    pub const RATE_CENTERS: std::ops::Range<usize> = 22..25;
}

/// Search-space box: output gains in [0, 200], adaptation-dynamics gains in
/// [0, 100], adaptation-rate diagonals in [0, 100], center magnitudes in
/// [0, 10].
pub fn parameter_bounds() -> Bounds {
    let mut lower = vec![0.0; PARAM_DIM];
    let mut upper = vec![0.0; PARAM_DIM];
    for i in 0..3 {
        upper[i] = 200.0;
    }
    upper[layout::KP] = 100.0;
    upper[layout::KD] = 100.0;
    for i in layout::GAMMA_ROLLYAW {
        upper[i] = 100.0;
    }
    for i in layout::GAMMA_PITCH {
        upper[i] = 100.0;
    }
    for i in layout::ERROR_CENTERS {
        upper[i] = 10.0;
    }
    for i in layout::RATE_CENTERS {
        upper[i] = 10.0;
    }
    // kp = 0 or kd = 0 has no Lyapunov solution; keep the box interior viable
    lower[layout::KP] = 1e-3;
    lower[layout::KD] = 1e-3;
    Bounds::new(lower, upper).expect("static bounds are well formed")
}

/// Wide search box used when an optimizer cannot take per-parameter bounds:
/// every dimension spans [0, 200].
pub fn undifferentiated_bounds() -> Bounds {
    let mut b = Bounds::uniform(PARAM_DIM, 0.0, 200.0).expect("static bounds");
    b.lower[layout::KP] = 1e-3;
    b.lower[layout::KD] = 1e-3;
    b
}

/// Adaptation-weighting matrices of the three loops.
///
/// The Lyapunov right-hand sides are design constants; these diagonals were
/// calibrated once against the published controller parameterization and are
/// deliberately rate-heavy, which keeps the adaptation transient smooth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptationWeighting {
    pub roll: SymMat2,
    pub yaw: SymMat2,
    pub pitch: SymMat2,
}

impl Default for AdaptationWeighting {
    fn default() -> Self {
        Self {
            roll: SymMat2::diagonal(DEFAULT_Q[0], DEFAULT_Q[1]),
            yaw: SymMat2::diagonal(DEFAULT_Q[2], DEFAULT_Q[3]),
            pitch: SymMat2::diagonal(DEFAULT_Q[4], DEFAULT_Q[5]),
        }
    }
}

/// Diagonal entries (q11, q22) per loop; see [`AdaptationWeighting`].
pub const DEFAULT_Q: [f64; 6] = [0.031, 0.874, 0.014, 0.804, 0.086, 3.181];

/// Sigmas are fixed at one for every membership function; only the centers
/// are optimized.
pub const MEMBERSHIP_SIGMA: f64 = 1.0;

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("parameter vector is not finite at index {0}")]
    NonFinite(usize),
    #[error(transparent)]
    Lyapunov(#[from] LyapunovError),
}

impl ParameterVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn from_slice(values: &[f64]) -> Option<Self> {
        (values.len() == PARAM_DIM).then(|| {
            let mut arr = [0.0; PARAM_DIM];
            arr.copy_from_slice(values);
            Self(arr)
        })
    }

    /// Published tuned parameterization of the modified optimizer.
    pub fn table_mpso() -> Self {
        let mut v = [0.0; PARAM_DIM];
        v[0] = 83.21;
        v[1] = 168.53;
        v[2] = 10.15;
        v[3] = 1.78;
        v[4] = 48.46;
        v[5..12].copy_from_slice(&[79.0, 68.0, 33.0, 0.0, 79.0, 42.0, 76.0]);
        v[12..19].copy_from_slice(&[53.0, 48.0, 11.0, 49.0, 3.0, 88.0, 19.0]);
        v[19..22].copy_from_slice(&[2.80, 0.0, 0.0]);
        v[22..25].copy_from_slice(&[9.51, 6.32, 0.97]);
        Self(v)
    }

    /// Published tuned parameterization of the standard optimizer.
    pub fn table_pso() -> Self {
        let mut v = [0.0; PARAM_DIM];
        v[0] = 68.46;
        v[1] = 157.95;
        v[2] = 125.58;
        v[3] = 5.57;
        v[4] = 33.19;
        v[5..12].copy_from_slice(&[70.0, 102.0, 77.0, 125.0, 55.0, 13.0, 112.0]);
        v[12..19].copy_from_slice(&[172.0, 100.0, 119.0, 185.0, 70.0, 155.0, 113.0]);
        v[19..22].copy_from_slice(&[120.92, 48.60, 0.04]);
        v[22..25].copy_from_slice(&[129.19, 125.02, 0.75]);
        Self(v)
    }

    /// Build the three adaptive loops for the nominal model constants.
    pub fn decode(&self, weighting: &AdaptationWeighting) -> Result<FuzzyAttitudeController, DecodeError> {
        self.decode_for(&ModelParams::default(), weighting)
    }

    /// Build the three adaptive loops using `params` for the channel-gain
    /// estimates.
    pub fn decode_for(
        &self,
        params: &ModelParams,
        weighting: &AdaptationWeighting,
    ) -> Result<FuzzyAttitudeController, DecodeError> {
        if let Some(i) = self.0.iter().position(|x| !x.is_finite()) {
            return Err(DecodeError::NonFinite(i));
        }
        let v = &self.0;
        let error_mags = [v[19], v[20], v[21]];
        let rate_mags = [v[22], v[23], v[24]];
        let rulebase = RuleBase::from_negative_magnitudes(error_mags, rate_mags, MEMBERSHIP_SIGMA)
            .expect("finite magnitudes and positive sigma");
        let mut gamma_ry = [0.0; 7];
        gamma_ry.copy_from_slice(&v[layout::GAMMA_ROLLYAW]);
        let mut gamma_p = [0.0; 7];
        gamma_p.copy_from_slice(&v[layout::GAMMA_PITCH]);
        let (eta_roll, eta_yaw, eta_pitch) = eta_values(params);
        let (kp, kd) = (v[layout::KP], v[layout::KD]);
        let roll = AdaptiveFuzzyLoop::new(
            rulebase.clone(),
            gamma_ry,
            kp,
            kd,
            eta_roll,
            v[layout::GAIN_ROLL],
            weighting.roll,
        )?;
        let yaw = AdaptiveFuzzyLoop::new(
            rulebase.clone(),
            gamma_ry,
            kp,
            kd,
            eta_yaw,
            v[layout::GAIN_YAW],
            weighting.yaw,
        )?;
        let pitch = AdaptiveFuzzyLoop::new(
            rulebase,
            gamma_p,
            kp,
            kd,
            eta_pitch,
            v[layout::GAIN_PITCH],
            weighting.pitch,
        )?;
        Ok(FuzzyAttitudeController::new(roll, yaw, pitch))
    }

    /// Read the 25 free values back out of a decoded controller.
    pub fn encode(ctrl: &FuzzyAttitudeController) -> Self {
        let mut v = [0.0; PARAM_DIM];
        v[layout::GAIN_ROLL] = ctrl.roll.output_gain;
        v[layout::GAIN_YAW] = ctrl.yaw.output_gain;
        v[layout::GAIN_PITCH] = ctrl.pitch.output_gain;
        v[layout::KP] = ctrl.roll.kp;
        v[layout::KD] = ctrl.roll.kd;
        v[layout::GAMMA_ROLLYAW].copy_from_slice(&ctrl.roll.gamma);
        v[layout::GAMMA_PITCH].copy_from_slice(&ctrl.pitch.gamma);
        v[layout::ERROR_CENTERS].copy_from_slice(&ctrl.roll.rulebase.error_magnitudes());
        v[layout::RATE_CENTERS].copy_from_slice(&ctrl.roll.rulebase.rate_magnitudes());
        Self(v)
    }
}

/// One recorded sample of a closed-loop run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
    pub desired_roll: f64,
    pub desired_pitch: f64,
    pub desired_yaw: f64,
    pub e_roll: f64,
    pub e_pitch: f64,
    pub e_yaw: f64,
    pub v1: f64,
    pub v2: f64,
    pub u1: f64,
    pub u2: f64,
}

/// Full trajectory of one run plus its summary metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub samples: Vec<Sample>,
    pub rmse: f64,
    pub iacs: f64,
    pub stable: bool,
    pub seed: u64,
    pub config_digest: String,
}

/// Which controller closes the loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ControllerSpec {
    Fuzzy {
        params: ParameterVector,
        weighting: AdaptationWeighting,
    },
    Pid(PidConfig),
}

impl ControllerSpec {
    pub fn fuzzy(params: ParameterVector) -> Self {
        Self::Fuzzy {
            params,
            weighting: AdaptationWeighting::default(),
        }
    }
}

enum Controller {
    Fuzzy(FuzzyAttitudeController),
    Pid(PidAttitudeController),
}

impl Controller {
    fn step(
        &mut self,
        state: &HelicopterState,
        target: &AttitudeTarget,
        dt: f64,
    ) -> Result<ControlFrame, crate::fuzzy::ControlError> {
        match self {
            Controller::Fuzzy(c) => c.step(state, target, dt),
            Controller::Pid(c) => c.step(state, target, dt),
        }
    }
}

fn digest(scenario: &Scenario, spec: &ControllerSpec) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("{scenario:?}|{spec:?}").as_bytes());
    let out = hasher.finalize();
    out.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Integrate the closed loop from the zero initial state.
///
/// The controller runs at the integration rate; inputs are held constant over
/// each RK4 step. A non-finite state or control signal marks the run unstable
/// and truncates the record (no panic; the objective consumes the flag).
pub fn simulate(scenario: &Scenario, spec: &ControllerSpec) -> RunRecord {
    let nominal = ModelParams::default();
    let plant_params = nominal.with_mass_scale(scenario.mass_scale);
    let mut controller = match spec {
        ControllerSpec::Fuzzy { params, weighting } => match params.decode_for(&nominal, weighting)
        {
            Ok(c) => Controller::Fuzzy(c),
            Err(_) => {
                // invalid adaptation dynamics: report an unstable empty run
                return RunRecord {
                    samples: Vec::new(),
                    rmse: f64::INFINITY,
                    iacs: f64::INFINITY,
                    stable: false,
                    seed: 0,
                    config_digest: digest(scenario, spec),
                };
            }
        },
        ControllerSpec::Pid(cfg) => Controller::Pid(PidAttitudeController::new(*cfg)),
    };

    let steps = (scenario.horizon / scenario.dt).round() as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    let mut state = HelicopterState::default();
    let mut stable = true;

    for k in 0..=steps {
        let t = k as f64 * scenario.dt;
        let target = AttitudeTarget {
            roll: desired_trajectory(t),
            roll_rate: desired_trajectory_rate(t),
            yaw: desired_trajectory(t),
            yaw_rate: desired_trajectory_rate(t),
        };
        let frame = match controller.step(&state, &target, scenario.dt) {
            Ok(f) => f,
            Err(_) => {
                stable = false;
                break;
            }
        };
        samples.push(Sample {
            t,
            roll: state.roll,
            pitch: state.pitch,
            yaw: state.yaw,
            desired_roll: target.roll,
            desired_pitch: frame.desired_pitch,
            desired_yaw: target.yaw,
            e_roll: frame.roll_error.e,
            e_pitch: frame.pitch_error.e,
            e_yaw: frame.yaw_error.e,
            v1: frame.virtual_inputs.v1,
            v2: frame.virtual_inputs.v2,
            u1: frame.inputs.u1,
            u2: frame.inputs.u2,
        });
        if k == steps {
            break;
        }
        let bias = scenario.accel_bias(t);
        let stepped = plant::rk4_step_with(
            |s| {
                let mut d = plant::state_derivative(s, &frame.inputs, &plant_params);
                d.roll_acc += bias[0];
                d.pitch_acc += bias[1];
                d.yaw_acc += bias[2];
                d
            },
            &state,
            scenario.dt,
        );
        let next = if scenario.enforce_angle_limits {
            plant::clamp_angles(&stepped)
        } else {
            stepped
        };
        if !next.is_finite() {
            stable = false;
            break;
        }
        state = next;
    }

    let mut record = RunRecord {
        samples,
        rmse: 0.0,
        iacs: 0.0,
        stable,
        seed: 0,
        config_digest: digest(scenario, spec),
    };
    record.rmse = rmse(&record);
    record.iacs = iacs(&record);
    record
}

/// Root of the time-mean of the summed squared tracking errors.
pub fn rmse(run: &RunRecord) -> f64 {
    if run.samples.is_empty() {
        return f64::INFINITY;
    }
    let sum: f64 = run
        .samples
        .iter()
        .map(|s| s.e_roll * s.e_roll + s.e_pitch * s.e_pitch + s.e_yaw * s.e_yaw)
        .sum();
    (sum / run.samples.len() as f64).sqrt()
}

/// Trapezoid integral of `|v1| + |v2| + |u2|` over the recorded horizon.
pub fn iacs(run: &RunRecord) -> f64 {
    if run.samples.len() < 2 {
        return 0.0;
    }
    let mut acc = 0.0;
    for w in run.samples.windows(2) {
        let f0 = w[0].v1.abs() + w[0].v2.abs() + w[0].u2.abs();
        let f1 = w[1].v1.abs() + w[1].v2.abs() + w[1].u2.abs();
        acc += 0.5 * (f0 + f1) * (w[1].t - w[0].t);
    }
    acc
}

/// Penalty for a run that blew up: at least 1e6, larger the earlier the blow-up.
pub const INSTABILITY_PENALTY: f64 = 1e6;

/// Tuning objective: decode, simulate the scenario, return the tracking RMSE,
/// or a penalty scaled by how early an unstable run died.
pub fn objective(pv: &ParameterVector, scenario: &Scenario) -> f64 {
    objective_with(pv, scenario, &AdaptationWeighting::default())
}

pub fn objective_with(
    pv: &ParameterVector,
    scenario: &Scenario,
    weighting: &AdaptationWeighting,
) -> f64 {
    let record = simulate(
        scenario,
        &ControllerSpec::Fuzzy {
            params: *pv,
            weighting: *weighting,
        },
    );
    if record.stable {
        record.rmse
    } else {
        let expected = (scenario.horizon / scenario.dt).round() as usize + 1;
        let fraction = record.samples.len() as f64 / expected as f64;
        INSTABILITY_PENALTY * (2.0 - fraction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::ControlInputs;
    use approx::assert_relative_eq;

    #[test]
    fn trajectory_examples() {
        assert_relative_eq!(desired_trajectory(-2.0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(desired_trajectory(0.0), 0.993307149, epsilon = 1e-9);
        assert!(desired_trajectory(100.0) > 1.0 - 1e-12);
        // rate is the analytic derivative of the sigmoid
        let h = 1e-6;
        let numeric = (desired_trajectory(1.0 + h) - desired_trajectory(1.0 - h)) / (2.0 * h);
        assert_relative_eq!(desired_trajectory_rate(1.0), numeric, epsilon = 1e-8);
    }

    #[test]
    fn scenario_validation() {
        assert!(Scenario::nominal().validate().is_ok());
        let mut bad = Scenario::nominal();
        bad.disturbances.push(Disturbance {
            axis: Axis::Roll,
            magnitude: 1.0,
            onset: 25.0,
        });
        assert!(bad.validate().is_err());
    }

    #[test]
    fn decode_matches_published_values() {
        let ctrl = ParameterVector::table_mpso()
            .decode(&AdaptationWeighting::default())
            .unwrap();
        assert_relative_eq!(ctrl.roll.output_gain, 83.21, epsilon = 1e-12);
        assert_relative_eq!(ctrl.yaw.output_gain, 168.53, epsilon = 1e-12);
        assert_relative_eq!(ctrl.pitch.output_gain, 10.15, epsilon = 1e-12);
        assert_eq!(
            ctrl.pitch.gamma,
            [53.0, 48.0, 11.0, 49.0, 3.0, 88.0, 19.0]
        );
        // NL center of the rate input
        assert_relative_eq!(
            ctrl.roll.rulebase.mfs_error_rate[0].center,
            -9.51,
            epsilon = 1e-12
        );
        // full odd symmetry incl. PL = -NL
        assert_relative_eq!(
            ctrl.roll.rulebase.mfs_error[6].center,
            2.80,
            epsilon = 1e-12
        );
        // shared rule base across loops
        assert_eq!(ctrl.roll.rulebase, ctrl.pitch.rulebase);
        // eta estimates from the nominal constants
        assert_relative_eq!(ctrl.pitch.eta_hat, 0.178 / 0.0451, epsilon = 1e-12);
    }

    #[test]
    fn decode_zero_vector_is_zero_controller() {
        let mut v = [0.0; PARAM_DIM];
        v[layout::KP] = 1.0;
        v[layout::KD] = 1.0;
        let mut ctrl = ParameterVector(v)
            .decode(&AdaptationWeighting::default())
            .unwrap();
        let frame = ctrl
            .step(&HelicopterState::default(), &AttitudeTarget::default(), 1e-3)
            .unwrap();
        assert_eq!(frame.inputs, ControlInputs::default());
    }

    #[test]
    fn decode_encode_round_trip() {
        for pv in [ParameterVector::table_mpso(), ParameterVector::table_pso()] {
            let ctrl = pv.decode(&AdaptationWeighting::default()).unwrap();
            let back = ParameterVector::encode(&ctrl);
            for i in 0..PARAM_DIM {
                assert_relative_eq!(back.0[i], pv.0[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn decode_encode_idempotent_on_canonical_form() {
        // center magnitudes arrive unsorted; one decode canonicalizes them
        let mut v = ParameterVector::table_mpso().0;
        v[22..25].copy_from_slice(&[0.97, 9.51, 6.32]);
        let once = ParameterVector::encode(
            &ParameterVector(v).decode(&AdaptationWeighting::default()).unwrap(),
        );
        let twice = ParameterVector::encode(
            &once.decode(&AdaptationWeighting::default()).unwrap(),
        );
        assert_eq!(once, twice);
        assert_eq!(once.0[22..25], [9.51, 6.32, 0.97]);
    }

    #[test]
    fn decode_rejects_degenerate_dynamics() {
        let mut v = ParameterVector::table_mpso().0;
        v[layout::KP] = 0.0;
        assert!(matches!(
            ParameterVector(v).decode(&AdaptationWeighting::default()),
            Err(DecodeError::Lyapunov(_))
        ));
    }

    #[test]
    fn metric_examples() {
        let mk = |errors: &[(f64, f64, f64)]| RunRecord {
            samples: errors
                .iter()
                .enumerate()
                .map(|(k, &(e1, e2, e3))| Sample {
                    t: k as f64,
                    roll: 0.0,
                    pitch: 0.0,
                    yaw: 0.0,
                    desired_roll: 0.0,
                    desired_pitch: 0.0,
                    desired_yaw: 0.0,
                    e_roll: e1,
                    e_pitch: e2,
                    e_yaw: e3,
                    v1: 0.0,
                    v2: 0.0,
                    u1: 0.0,
                    u2: 0.0,
                })
                .collect(),
            rmse: 0.0,
            iacs: 0.0,
            stable: true,
            seed: 0,
            config_digest: String::new(),
        };
        assert_eq!(rmse(&mk(&[(0.0, 0.0, 0.0); 5])), 0.0);
        assert_relative_eq!(rmse(&mk(&[(1.0, 0.0, 0.0); 7])), 1.0, epsilon = 1e-15);
        assert_relative_eq!(
            rmse(&mk(&[(1.0, 1.0, 1.0); 4])),
            3f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn iacs_unit_rectangle() {
        let samples: Vec<Sample> = (0..=1000)
            .map(|k| Sample {
                t: k as f64 * 1e-3,
                roll: 0.0,
                pitch: 0.0,
                yaw: 0.0,
                desired_roll: 0.0,
                desired_pitch: 0.0,
                desired_yaw: 0.0,
                e_roll: 0.0,
                e_pitch: 0.0,
                e_yaw: 0.0,
                v1: 1.0,
                v2: 0.0,
                u1: 0.0,
                u2: 0.0,
            })
            .collect();
        let run = RunRecord {
            samples,
            rmse: 0.0,
            iacs: 0.0,
            stable: true,
            seed: 0,
            config_digest: String::new(),
        };
        assert_relative_eq!(iacs(&run), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn iacs_additive_over_segments() {
        let mk = |t0: f64, n: usize| -> Vec<Sample> {
            (0..=n)
                .map(|k| Sample {
                    t: t0 + k as f64 * 1e-2,
                    roll: 0.0,
                    pitch: 0.0,
                    yaw: 0.0,
                    desired_roll: 0.0,
                    desired_pitch: 0.0,
                    desired_yaw: 0.0,
                    e_roll: 0.0,
                    e_pitch: 0.0,
                    e_yaw: 0.0,
                    v1: (t0 + k as f64 * 1e-2).sin(),
                    v2: 0.3,
                    u1: 0.0,
                    u2: -0.2,
                })
                .collect()
        };
        let whole = RunRecord {
            samples: mk(0.0, 200),
            rmse: 0.0,
            iacs: 0.0,
            stable: true,
            seed: 0,
            config_digest: String::new(),
        };
        let first = RunRecord {
            samples: mk(0.0, 100),
            ..whole.clone()
        };
        let second = RunRecord {
            samples: mk(1.0, 100),
            ..whole.clone()
        };
        assert_relative_eq!(
            iacs(&whole),
            iacs(&first) + iacs(&second),
            epsilon = 1e-12
        );
    }

    #[test]
    fn zero_gain_controller_drifts_open_loop() {
        let mut v = [0.0; PARAM_DIM];
        v[layout::KP] = 1.0;
        v[layout::KD] = 1.0;
        let mut scenario = Scenario::nominal();
        scenario.horizon = 2.0;
        let record = simulate(&scenario, &ControllerSpec::fuzzy(ParameterVector(v)));
        assert!(record.stable);
        assert!(record.rmse > 0.1, "gravity drift must show up, rmse={}", record.rmse);
        // control stays identically zero
        assert!(record.samples.iter().all(|s| s.u1 == 0.0 && s.u2 == 0.0));
    }

    #[test]
    fn nominal_equals_mass_one_bitwise() {
        let spec = ControllerSpec::fuzzy(ParameterVector::table_mpso());
        let mut a = Scenario::nominal();
        a.horizon = 1.0;
        let mut b = Scenario::mass_scaled(1.0);
        b.horizon = 1.0;
        b.label = a.label.clone(); // digest covers the label; compare the physics
        let ra = simulate(&a, &spec);
        let rb = simulate(&b, &spec);
        assert_eq!(ra.samples, rb.samples);
        assert_eq!(ra.rmse, rb.rmse);
    }

    #[test]
    fn disturbance_prefix_identical() {
        let spec = ControllerSpec::fuzzy(ParameterVector::table_mpso());
        let mut disturbed = Scenario::nominal();
        disturbed.horizon = 3.0;
        disturbed.disturbances.push(Disturbance {
            axis: Axis::Roll,
            magnitude: 1.0,
            onset: 2.0,
        });
        let mut clean = Scenario::nominal();
        clean.horizon = 3.0;
        let rd = simulate(&disturbed, &spec);
        let rc = simulate(&clean, &spec);
        let cut = (2.0 / clean.dt) as usize;
        assert_eq!(&rd.samples[..cut], &rc.samples[..cut]);
        assert_ne!(&rd.samples[cut + 2..], &rc.samples[cut + 2..]);
    }

    #[test]
    fn unstable_run_is_penalized() {
        // gigantic adaptation rates blow the loop up quickly
        let mut v = ParameterVector::table_mpso().0;
        for i in layout::GAMMA_ROLLYAW {
            v[i] = 1e9;
        }
        let mut scenario = Scenario::nominal();
        scenario.horizon = 5.0;
        let cost = objective(&ParameterVector(v), &scenario);
        assert!(cost >= INSTABILITY_PENALTY);
    }

    #[test]
    fn objective_is_deterministic() {
        let mut scenario = Scenario::nominal();
        scenario.horizon = 1.0;
        let pv = ParameterVector::table_mpso();
        assert_eq!(objective(&pv, &scenario), objective(&pv, &scenario));
    }
}
