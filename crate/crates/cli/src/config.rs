//! TOML configuration covering the model constants, scenario selection,
//! optimizer settings, PID gains, and the search-space bounds. Every default
//! matches the workbench's built-in values; a config file overrides only the
//! keys it names.

use anyhow::{bail, Context, Result};
use heli3dof::experiments::{
    self, AdaptationWeighting, Axis, Disturbance, ParameterVector, Scenario, PARAM_DIM,
};
use heli3dof::fuzzy::SymMat2;
use heli3dof::pid::PidConfig;
use heli3dof::plant::ModelParams;
use heli3dof::swarm::{Bounds, SwarmConfig};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub swarm: SwarmSection,
    #[serde(default)]
    pub fuzzy: FuzzySection,
    #[serde(default)]
    pub pid: PidSection,
    #[serde(default)]
    pub bounds: BoundsSection,
}

macro_rules! opt_fields {
    ($name:ident { $($field:ident),* $(,)? }) => {
        #[derive(Debug, Clone, Default, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $( #[serde(default)] pub $field: Option<f64>, )*
        }
    };
}

opt_fields!(ModelSection {
    m_heli,
    m_counter,
    l_a,
    l_w,
    l_h,
    j_roll,
    j_pitch,
    j_yaw,
    g,
});

impl ModelSection {
    pub fn resolve(&self) -> Result<ModelParams> {
        let mut p = ModelParams::default();
        if let Some(v) = self.m_heli {
            p.m_heli = v;
        }
        if let Some(v) = self.m_counter {
            p.m_counter = v;
        }
        if let Some(v) = self.l_a {
            p.l_a = v;
        }
        if let Some(v) = self.l_w {
            p.l_w = v;
        }
        if let Some(v) = self.l_h {
            p.l_h = v;
        }
        if let Some(v) = self.j_roll {
            p.j_roll = v;
        }
        if let Some(v) = self.j_pitch {
            p.j_pitch = v;
        }
        if let Some(v) = self.j_yaw {
            p.j_yaw = v;
        }
        if let Some(v) = self.g {
            p.g = v;
        }
        p.validate().context("invalid [model] section")?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    /// One of: nominal, half-mass, mass-1.5, disturbance.
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub mass_scale: Option<f64>,
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub enforce_angle_limits: Option<bool>,
    #[serde(default)]
    pub disturbances: Vec<DisturbanceEntry>,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            preset: None,
            mass_scale: None,
            horizon: None,
            dt: None,
            enforce_angle_limits: None,
            disturbances: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceEntry {
    pub axis: String,
    pub magnitude: f64,
    pub onset: f64,
}

pub fn scenario_preset(name: &str) -> Result<Scenario> {
    Ok(match name {
        "nominal" => Scenario::nominal(),
        "half-mass" => Scenario::mass_scaled(0.5),
        "mass-1.5" => Scenario::mass_scaled(1.5),
        "disturbance" => Scenario::disturbed(),
        other => bail!("unknown scenario preset '{other}' (expected nominal, half-mass, mass-1.5, or disturbance)"),
    })
}

impl ScenarioSection {
    pub fn resolve(&self) -> Result<Scenario> {
        let mut s = match &self.preset {
            Some(name) => scenario_preset(name)?,
            None => Scenario::nominal(),
        };
        if let Some(v) = self.mass_scale {
            s.mass_scale = v;
            s.label = format!("mass-{v}");
        }
        if let Some(v) = self.horizon {
            s.horizon = v;
        }
        if let Some(v) = self.dt {
            s.dt = v;
        }
        if let Some(v) = self.enforce_angle_limits {
            s.enforce_angle_limits = v;
        }
        for d in &self.disturbances {
            let axis = match d.axis.as_str() {
                "roll" => Axis::Roll,
                "pitch" => Axis::Pitch,
                "yaw" => Axis::Yaw,
                other => bail!("unknown disturbance axis '{other}'"),
            };
            s.disturbances.push(Disturbance {
                axis,
                magnitude: d.magnitude,
                onset: d.onset,
            });
        }
        s.validate()
            .map_err(|e| anyhow::anyhow!("invalid [scenario] section: {e}"))?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwarmSection {
    #[serde(default)]
    pub population: Option<usize>,
    #[serde(default)]
    pub iterations: Option<usize>,
    #[serde(default)]
    pub w0: Option<f64>,
    #[serde(default)]
    pub w_decay: Option<f64>,
    #[serde(default)]
    pub c1: Option<f64>,
    #[serde(default)]
    pub c2: Option<f64>,
    #[serde(default)]
    pub elim_percent: Option<f64>,
    #[serde(default)]
    pub elim_period: Option<usize>,
    #[serde(default)]
    pub saturation_percent: Option<f64>,
}

impl SwarmSection {
    pub fn resolve(&self, seed: u64, mpso_enabled: bool) -> Result<SwarmConfig> {
        let mut cfg = SwarmConfig {
            seed,
            mpso_enabled,
            ..Default::default()
        };
        if let Some(v) = self.population {
            cfg.population = v;
        }
        if let Some(v) = self.iterations {
            cfg.iterations = v;
        }
        if let Some(v) = self.w0 {
            cfg.w0 = v;
        }
        if let Some(v) = self.w_decay {
            cfg.w_decay = v;
        }
        if let Some(v) = self.c1 {
            cfg.c1 = v;
        }
        if let Some(v) = self.c2 {
            cfg.c2 = v;
        }
        if let Some(v) = self.elim_percent {
            cfg.elim_percent = v;
        }
        if let Some(v) = self.elim_period {
            cfg.elim_period = v;
        }
        if let Some(v) = self.saturation_percent {
            cfg.saturation_percent = v;
        }
        cfg.validate()
            .map_err(|e| anyhow::anyhow!("invalid [swarm] section: {e}"))?;
        Ok(cfg)
    }
}

/// Adaptation-weighting overrides plus optional explicit controller vectors.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzySection {
    /// Six diagonal entries: roll q11, q22, yaw q11, q22, pitch q11, q22.
    #[serde(default)]
    pub q_diagonals: Option<[f64; 6]>,
    /// Explicit 25-value controller vector for `--controller file`.
    #[serde(default)]
    pub parameters: Option<Vec<f64>>,
}

impl FuzzySection {
    pub fn weighting(&self) -> AdaptationWeighting {
        match self.q_diagonals {
            Some(q) => AdaptationWeighting {
                roll: SymMat2::diagonal(q[0], q[1]),
                yaw: SymMat2::diagonal(q[2], q[3]),
                pitch: SymMat2::diagonal(q[4], q[5]),
            },
            None => AdaptationWeighting::default(),
        }
    }

    pub fn parameter_vector(&self) -> Result<Option<ParameterVector>> {
        match &self.parameters {
            None => Ok(None),
            Some(values) => match ParameterVector::from_slice(values) {
                Some(pv) => Ok(Some(pv)),
                None => bail!(
                    "fuzzy.parameters must hold exactly {PARAM_DIM} values, got {}",
                    values.len()
                ),
            },
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidSection {
    #[serde(default)]
    pub roll: Option<PidGainsEntry>,
    #[serde(default)]
    pub yaw: Option<PidGainsEntry>,
    #[serde(default)]
    pub pitch: Option<PidGainsEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidGainsEntry {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    #[serde(default = "default_integral_limit")]
    pub integral_limit: f64,
}

fn default_integral_limit() -> f64 {
    2.0
}

impl PidSection {
    pub fn resolve(&self) -> Result<PidConfig> {
        let mut cfg = PidConfig::default();
        let apply = |target: &mut heli3dof::pid::PidGains, entry: &PidGainsEntry| {
            target.kp = entry.kp;
            target.ki = entry.ki;
            target.kd = entry.kd;
            target.integral_limit = entry.integral_limit;
        };
        if let Some(e) = &self.roll {
            apply(&mut cfg.roll, e);
        }
        if let Some(e) = &self.yaw {
            apply(&mut cfg.yaw, e);
        }
        if let Some(e) = &self.pitch {
            apply(&mut cfg.pitch, e);
        }
        for (axis, g) in [("roll", cfg.roll), ("yaw", cfg.yaw), ("pitch", cfg.pitch)] {
            if !g.validate() {
                bail!("invalid [pid.{axis}] gains");
            }
        }
        Ok(cfg)
    }
}

/// Search-box overrides for the two optimizers.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    #[serde(default)]
    pub mpso_lower: Option<Vec<f64>>,
    #[serde(default)]
    pub mpso_upper: Option<Vec<f64>>,
    #[serde(default)]
    pub pso_lower: Option<Vec<f64>>,
    #[serde(default)]
    pub pso_upper: Option<Vec<f64>>,
}

impl BoundsSection {
    pub fn mpso(&self) -> Result<Bounds> {
        resolve_bounds(&self.mpso_lower, &self.mpso_upper, experiments::parameter_bounds())
    }

    pub fn pso(&self) -> Result<Bounds> {
        resolve_bounds(
            &self.pso_lower,
            &self.pso_upper,
            experiments::undifferentiated_bounds(),
        )
    }
}

fn resolve_bounds(
    lower: &Option<Vec<f64>>,
    upper: &Option<Vec<f64>>,
    default: Bounds,
) -> Result<Bounds> {
    match (lower, upper) {
        (None, None) => Ok(default),
        (Some(lo), Some(hi)) => {
            if lo.len() != PARAM_DIM || hi.len() != PARAM_DIM {
                bail!("bound arrays must hold exactly {PARAM_DIM} values");
            }
            Bounds::new(lo.clone(), hi.clone())
                .map_err(|e| anyhow::anyhow!("invalid [bounds] section: {e}"))
        }
        _ => bail!("bounds require both lower and upper arrays"),
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).context("cannot parse config file")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_builtin_values() {
        let cfg = Config::parse("").unwrap();
        let model = cfg.model.resolve().unwrap();
        assert_eq!(model, ModelParams::default());
        let swarm = cfg.swarm.resolve(7, true).unwrap();
        assert_eq!(swarm.population, 30);
        assert_eq!(swarm.elim_percent, 75.0);
        assert_eq!(swarm.elim_period, 40);
        assert_eq!(swarm.seed, 7);
        let scenario = cfg.scenario.resolve().unwrap();
        assert_eq!(scenario, Scenario::nominal());
    }

    #[test]
    fn overrides_apply() {
        let cfg = Config::parse(
            r#"
[model]
m_heli = 2.0

[scenario]
preset = "half-mass"
horizon = 10.0

[swarm]
population = 12
iterations = 50

[fuzzy]
q_diagonals = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]

[pid.roll]
kp = 1.0
ki = 0.5
kd = 2.0
"#,
        )
        .unwrap();
        assert_eq!(cfg.model.resolve().unwrap().m_heli, 2.0);
        let s = cfg.scenario.resolve().unwrap();
        assert_eq!(s.mass_scale, 0.5);
        assert_eq!(s.horizon, 10.0);
        assert_eq!(cfg.swarm.resolve(0, false).unwrap().population, 12);
        let w = cfg.fuzzy.weighting();
        assert_eq!(w.yaw.a11, 3.0);
        let pid = cfg.pid.resolve().unwrap();
        assert_eq!(pid.roll.kp, 1.0);
        assert_eq!(pid.roll.integral_limit, 2.0);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Config::parse("[swarm]\nbogus = 1").is_err());
        let cfg = Config::parse("[model]\nm_heli = -1.0").unwrap();
        assert!(cfg.model.resolve().is_err());
        let cfg = Config::parse("[scenario]\npreset = \"flight\"").unwrap();
        assert!(cfg.scenario.resolve().is_err());
    }

    #[test]
    fn explicit_parameter_vector_roundtrip() {
        let values: Vec<f64> = (0..PARAM_DIM).map(|i| i as f64).collect();
        let toml = format!("[fuzzy]\nparameters = {values:?}");
        let cfg = Config::parse(&toml).unwrap();
        let pv = cfg.fuzzy.parameter_vector().unwrap().unwrap();
        assert_eq!(pv.as_slice()[24], 24.0);
        let bad = Config::parse("[fuzzy]\nparameters = [1.0, 2.0]").unwrap();
        assert!(bad.parameter_vector_err());
    }

    impl Config {
        fn parameter_vector_err(&self) -> bool {
            self.fuzzy.parameter_vector().is_err()
        }
    }
}
