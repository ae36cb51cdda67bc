//! Multi-seed optimizer comparison on the controller-tuning objective.

use crate::experiments::{self, AdaptationWeighting, ParameterVector, Scenario};
use crate::swarm::{self, Bounds, SwarmConfig, TraceEntry};
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Pso,
    Mpso,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Pso => "pso",
            Algorithm::Mpso => "mpso",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pso" => Ok(Algorithm::Pso),
            "mpso" => Ok(Algorithm::Mpso),
            other => Err(format!("unknown algorithm '{other}' (expected pso or mpso)")),
        }
    }
}

/// One optimizer execution inside a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignRun {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub best_cost: f64,
    pub best_position: Vec<f64>,
    pub trace: Vec<TraceEntry>,
    /// Wall-clock seconds; informational only, never part of reproducible output.
    pub wall_secs: f64,
}

/// All runs of a campaign, one per (algorithm, seed) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub runs: Vec<CampaignRun>,
}

impl CampaignResult {
    pub fn costs_for(&self, algorithm: Algorithm) -> Vec<f64> {
        self.runs
            .iter()
            .filter(|r| r.algorithm == algorithm)
            .map(|r| r.best_cost)
            .collect()
    }

    pub fn best_for(&self, algorithm: Algorithm) -> Option<&CampaignRun> {
        self.runs
            .iter()
            .filter(|r| r.algorithm == algorithm)
            .min_by(|a, b| a.best_cost.total_cmp(&b.best_cost))
    }

    pub fn mean_cost_for(&self, algorithm: Algorithm) -> Option<f64> {
        let costs = self.costs_for(algorithm);
        (!costs.is_empty()).then(|| costs.iter().sum::<f64>() / costs.len() as f64)
    }

    pub fn mean_wall_secs_for(&self, algorithm: Algorithm) -> Option<f64> {
        let secs: Vec<f64> = self
            .runs
            .iter()
            .filter(|r| r.algorithm == algorithm)
            .map(|r| r.wall_secs)
            .collect();
        (!secs.is_empty()).then(|| secs.iter().sum::<f64>() / secs.len() as f64)
    }
}

/// Campaign setup: shared optimizer settings plus per-algorithm search boxes.
///
/// The modified optimizer takes the per-parameter box; the standard one runs
/// in the undifferentiated wide box, mirroring the published protocol where
/// only some algorithms can take per-parameter bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub scenario: Scenario,
    pub swarm: SwarmConfig,
    pub weighting: AdaptationWeighting,
    pub mpso_bounds: Bounds,
    pub pso_bounds: Bounds,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::nominal(),
            swarm: SwarmConfig::default(),
            weighting: AdaptationWeighting::default(),
            mpso_bounds: experiments::parameter_bounds(),
            pso_bounds: experiments::undifferentiated_bounds(),
        }
    }
}

/// Run one algorithm for one seed on the tuning objective.
pub fn run_single(
    algorithm: Algorithm,
    seed: u64,
    cfg: &CampaignConfig,
) -> Result<CampaignRun, swarm::SwarmError> {
    let swarm_cfg = SwarmConfig {
        seed,
        mpso_enabled: algorithm == Algorithm::Mpso,
        ..cfg.swarm.clone()
    };
    let bounds = match algorithm {
        Algorithm::Mpso => &cfg.mpso_bounds,
        Algorithm::Pso => &cfg.pso_bounds,
    };
    let scenario = cfg.scenario.clone();
    let weighting = cfg.weighting;
    let objective = move |x: &[f64]| -> f64 {
        match ParameterVector::from_slice(x) {
            Some(pv) => experiments::objective_with(&pv, &scenario, &weighting),
            None => f64::INFINITY,
        }
    };
    let started = Instant::now();
    let run = swarm::run(objective, &swarm_cfg, bounds)?;
    Ok(CampaignRun {
        algorithm,
        seed,
        best_cost: run.best_cost,
        best_position: run.best_position,
        trace: run.trace,
        wall_secs: started.elapsed().as_secs_f64(),
    })
}

/// Run every algorithm once per seed. Runs execute sequentially here; the
/// particle evaluations inside each run are already parallel.
pub fn run_campaign(
    algorithms: &[Algorithm],
    seeds: &[u64],
    cfg: &CampaignConfig,
) -> Result<CampaignResult, swarm::SwarmError> {
    let mut runs = Vec::with_capacity(algorithms.len() * seeds.len());
    for &algorithm in algorithms {
        for &seed in seeds {
            runs.push(run_single(algorithm, seed, cfg)?);
        }
    }
    Ok(CampaignResult { runs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_cfg() -> CampaignConfig {
        let mut cfg = CampaignConfig::default();
        cfg.scenario.horizon = 0.5;
        cfg.swarm.population = 6;
        cfg.swarm.iterations = 4;
        cfg.swarm.elim_period = 2;
        cfg
    }

    #[test]
    fn campaign_shapes_and_determinism() {
        let cfg = tiny_cfg();
        let result = run_campaign(&[Algorithm::Pso, Algorithm::Mpso], &[1, 2], &cfg).unwrap();
        assert_eq!(result.runs.len(), 4);
        assert_eq!(result.costs_for(Algorithm::Pso).len(), 2);
        assert_eq!(result.costs_for(Algorithm::Mpso).len(), 2);
        let again = run_campaign(&[Algorithm::Pso, Algorithm::Mpso], &[1, 2], &cfg).unwrap();
        for (a, b) in result.runs.iter().zip(&again.runs) {
            assert_eq!(a.best_cost, b.best_cost);
            assert_eq!(a.best_position, b.best_position);
            assert_eq!(a.trace, b.trace);
        }
        let best = result.best_for(Algorithm::Pso).unwrap();
        assert_eq!(
            best.best_cost,
            result
                .costs_for(Algorithm::Pso)
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min)
        );
    }

    #[test]
    fn algorithm_parsing() {
        assert_eq!("MPSO".parse::<Algorithm>(), Ok(Algorithm::Mpso));
        assert_eq!("pso".parse::<Algorithm>(), Ok(Algorithm::Pso));
        assert!("abc".parse::<Algorithm>().is_err());
    }
}
