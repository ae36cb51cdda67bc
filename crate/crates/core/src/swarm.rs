//! Particle swarm optimization with an optional modified variant (MPSO).
//!
//! The modification adds two mechanisms on top of the standard velocity and
//! position updates: every `elim_period` iterations each particle's
//! per-dimension search bounds are expanded where the particle presses
//! against them and contracted where it does not, and the worst
//! `elim_percent` of the population is resampled inside its adapted bounds.
//!
//! Runs are deterministic for a fixed seed. The RNG draw order is part of the
//! contract: initialization draws positions then velocities per particle
//! (dimension-minor), and each particle update draws `r1, r2` per dimension.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Per-dimension box bounds of the search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, SwarmError> {
        if lower.len() != upper.len() {
            return Err(SwarmError::DimensionMismatch {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        for (j, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo <= hi) {
                return Err(SwarmError::InvertedBound { dim: j });
            }
        }
        Ok(Self { lower, upper })
    }

    /// Same bound for every one of `dim` dimensions.
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self, SwarmError> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn half_width(&self, j: usize) -> f64 {
        (self.upper[j] - self.lower[j]) / 2.0
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SwarmError {
    #[error("bound arrays disagree in length: {lower} vs {upper}")]
    DimensionMismatch { lower: usize, upper: usize },
    #[error("lower bound exceeds upper bound in dimension {dim}")]
    InvertedBound { dim: usize },
    #[error("population must be positive")]
    EmptyPopulation,
    #[error("inertia decay must lie in (0, 1], got {0}")]
    BadDecay(f64),
    #[error("elimination percentage must lie in [0, 100], got {0}")]
    BadElimPercent(f64),
}

/// Optimizer settings. Defaults follow the tuning study's setup: population
/// 30, unit initial inertia decaying by 0.98 per iteration, acceleration
/// factors 2, elimination of the worst 75% every 40 iterations, and a 90%
/// saturation value for the bound-adjustment unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmConfig {
    pub population: usize,
    pub iterations: usize,
    pub w0: f64,
    pub w_decay: f64,
    pub c1: f64,
    pub c2: f64,
    pub seed: u64,
    pub mpso_enabled: bool,
    pub elim_percent: f64,
    pub elim_period: usize,
    pub saturation_percent: f64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            population: 30,
            iterations: 500,
            w0: 1.0,
            w_decay: 0.98,
            c1: 2.0,
            c2: 2.0,
            seed: 0,
            mpso_enabled: true,
            elim_percent: 75.0,
            elim_period: 40,
            saturation_percent: 90.0,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<(), SwarmError> {
        if self.population == 0 {
            return Err(SwarmError::EmptyPopulation);
        }
        if !(self.w_decay > 0.0 && self.w_decay <= 1.0) {
            return Err(SwarmError::BadDecay(self.w_decay));
        }
        if !(0.0..=100.0).contains(&self.elim_percent) {
            return Err(SwarmError::BadElimPercent(self.elim_percent));
        }
        Ok(())
    }
}

/// One swarm member. In MPSO mode each particle owns its adapted bounds;
/// in standard mode they stay equal to the global bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_cost: f64,
    pub cost: f64,
    pub bounds: Bounds,
}

/// Inertia weight at a zero-based iteration index: `w0 * w_decay^iter`.
pub fn inertia_at(iter: usize, cfg: &SwarmConfig) -> f64 {
    cfg.w0 * cfg.w_decay.powi(iter as i32)
}

/// Fresh swarm: positions uniform inside the bounds, velocities uniform in
/// +/- half the bound width per dimension, bests at the (not yet evaluated)
/// initial positions.
pub fn init_swarm(bounds: &Bounds, cfg: &SwarmConfig, rng: &mut ChaCha8Rng) -> Vec<Particle> {
    let dim = bounds.dim();
    (0..cfg.population)
        .map(|_| {
            let mut position = vec![0.0; dim];
            let mut velocity = vec![0.0; dim];
            for (j, p) in position.iter_mut().enumerate() {
                *p = bounds.lower[j] + (bounds.upper[j] - bounds.lower[j]) * rng.random::<f64>();
            }
            for (j, v) in velocity.iter_mut().enumerate() {
                *v = (2.0 * rng.random::<f64>() - 1.0) * bounds.half_width(j);
            }
            Particle {
                best_position: position.clone(),
                position,
                velocity,
                best_cost: f64::INFINITY,
                cost: f64::INFINITY,
                bounds: bounds.clone(),
            }
        })
        .collect()
}

/// Velocity and position update with explicit random factors, one `(r1, r2)`
/// pair per dimension. Split out so the kinematics can be checked directly.
pub fn kinematic_update(p: &mut Particle, g_best: &[f64], w: f64, c1: f64, c2: f64, draws: &[(f64, f64)]) {
    for j in 0..p.position.len() {
        let (r1, r2) = draws[j];
        p.velocity[j] = w * p.velocity[j]
            + c1 * r1 * (p.best_position[j] - p.position[j])
            + c2 * r2 * (g_best[j] - p.position[j]);
        p.position[j] += p.velocity[j];
    }
    // box handling: clamp and zero the offending velocity component
    for j in 0..p.position.len() {
        if p.position[j] < p.bounds.lower[j] {
            p.position[j] = p.bounds.lower[j];
            p.velocity[j] = 0.0;
        } else if p.position[j] > p.bounds.upper[j] {
            p.position[j] = p.bounds.upper[j];
            p.velocity[j] = 0.0;
        }
    }
}

/// Standard update: fresh uniform `r1, r2` per dimension from the shared stream.
pub fn update_particle(
    p: &mut Particle,
    g_best: &[f64],
    w: f64,
    cfg: &SwarmConfig,
    rng: &mut ChaCha8Rng,
) {
    let draws: Vec<(f64, f64)> = (0..p.position.len())
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    kinematic_update(p, g_best, w, cfg.c1, cfg.c2, &draws);
}

/// Expand or contract one particle's bounds. The adjustment unit per
/// dimension is `(100 - saturation_percent)/100` of the dimension's initial
/// half-width. A value at or beyond a bound pushes that bound outward by one
/// unit; a value strictly inside pulls it inward by one unit.
pub fn adapt_bounds(p: &mut Particle, saturation_percent: f64, initial: &Bounds) {
    for j in 0..p.position.len() {
        let unit = (100.0 - saturation_percent) / 100.0 * initial.half_width(j);
        if unit == 0.0 {
            continue;
        }
        let x = p.position[j];
        let (lo, hi) = (p.bounds.lower[j], p.bounds.upper[j]);
        let new_hi = if x >= hi { hi + unit } else { hi - unit };
        let new_lo = if x <= lo { lo - unit } else { lo + unit };
        if new_lo <= new_hi {
            p.bounds.lower[j] = new_lo;
            p.bounds.upper[j] = new_hi;
        } else {
            // contraction crossed over; collapse to the midpoint
            let mid = 0.5 * (new_lo + new_hi);
            p.bounds.lower[j] = mid;
            p.bounds.upper[j] = mid;
        }
    }
}

/// Replace the worst `elim_percent` of the population (ceiling count, ties
/// broken by particle index) with fresh particles sampled uniformly inside
/// their own current bounds. Replaced particles' bests are reset; the global
/// best is unaffected.
pub fn eliminate(particles: &mut [Particle], cfg: &SwarmConfig, rng: &mut ChaCha8Rng) {
    let count = ((cfg.elim_percent / 100.0) * particles.len() as f64).ceil() as usize;
    if count == 0 {
        return;
    }
    let mut order: Vec<usize> = (0..particles.len()).collect();
    order.sort_by(|&a, &b| {
        particles[b]
            .cost
            .total_cmp(&particles[a].cost)
            .then(a.cmp(&b))
    });
    let mut victims: Vec<usize> = order.into_iter().take(count).collect();
    victims.sort_unstable(); // deterministic draw order
    for i in victims {
        let p = &mut particles[i];
        for j in 0..p.position.len() {
            p.position[j] = p.bounds.lower[j]
                + (p.bounds.upper[j] - p.bounds.lower[j]) * rng.random::<f64>();
        }
        for j in 0..p.velocity.len() {
            p.velocity[j] = (2.0 * rng.random::<f64>() - 1.0) * p.bounds.half_width(j);
        }
        p.best_position = p.position.clone();
        p.best_cost = f64::INFINITY;
        p.cost = f64::INFINITY;
    }
}

/// One row of the per-iteration trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub best_cost: f64,
    pub mean_cost: f64,
    pub inertia: f64,
}

/// Result of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmRun {
    pub best_position: Vec<f64>,
    pub best_cost: f64,
    pub trace: Vec<TraceEntry>,
}

/// Full optimization loop. Iterations are one-based for the elimination
/// trigger (`iter % elim_period == 0`); the inertia of iteration `k` is
/// `inertia_at(k - 1)`. Objective evaluations within an iteration may run in
/// parallel; results merge in particle-index order, so runs stay
/// deterministic for a fixed seed.
pub fn run<F>(objective: F, cfg: &SwarmConfig, bounds: &Bounds) -> Result<SwarmRun, SwarmError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut particles = init_swarm(bounds, cfg, &mut rng);
    let mut g_best_position = particles[0].position.clone();
    let mut g_best_cost = f64::INFINITY;
    let mut trace = Vec::with_capacity(cfg.iterations);

    for iter in 1..=cfg.iterations {
        let w = inertia_at(iter - 1, cfg);
        let costs: Vec<f64> = particles
            .par_iter()
            .map(|p| objective(&p.position))
            .collect();
        let mut sum = 0.0;
        for (p, &cost) in particles.iter_mut().zip(&costs) {
            p.cost = cost;
            sum += cost;
            if cost < p.best_cost {
                p.best_cost = cost;
                p.best_position.clone_from(&p.position);
            }
        }
        for p in &particles {
            if p.best_cost < g_best_cost {
                g_best_cost = p.best_cost;
                g_best_position.clone_from(&p.best_position);
            }
        }
        trace.push(TraceEntry {
            iteration: iter,
            best_cost: g_best_cost,
            mean_cost: sum / particles.len() as f64,
            inertia: w,
        });
        for p in particles.iter_mut() {
            update_particle(p, &g_best_position, w, cfg, &mut rng);
        }
        if cfg.mpso_enabled && iter % cfg.elim_period == 0 {
            for p in particles.iter_mut() {
                adapt_bounds(p, cfg.saturation_percent, bounds);
            }
            eliminate(&mut particles, cfg, &mut rng);
        }
    }
    Ok(SwarmRun {
        best_position: g_best_position,
        best_cost: g_best_cost,
        trace,
    })
}

/// Final per-particle bounds of a finished run, re-simulated for inspection.
/// Used by diagnostics that need to confirm bound adaptation engaged; the
/// optimizer itself keeps bounds internal to the run.
pub fn final_bounds<F>(objective: F, cfg: &SwarmConfig, bounds: &Bounds) -> Result<Vec<Bounds>, SwarmError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut particles = init_swarm(bounds, cfg, &mut rng);
    let mut g_best_position = particles[0].position.clone();
    let mut g_best_cost = f64::INFINITY;
    for iter in 1..=cfg.iterations {
        let w = inertia_at(iter - 1, cfg);
        let costs: Vec<f64> = particles
            .par_iter()
            .map(|p| objective(&p.position))
            .collect();
        for (p, &cost) in particles.iter_mut().zip(&costs) {
            p.cost = cost;
            if cost < p.best_cost {
                p.best_cost = cost;
                p.best_position.clone_from(&p.position);
            }
        }
        for p in &particles {
            if p.best_cost < g_best_cost {
                g_best_cost = p.best_cost;
                g_best_position.clone_from(&p.best_position);
            }
        }
        for p in particles.iter_mut() {
            update_particle(p, &g_best_position, w, cfg, &mut rng);
        }
        if cfg.mpso_enabled && iter % cfg.elim_period == 0 {
            for p in particles.iter_mut() {
                adapt_bounds(p, cfg.saturation_percent, bounds);
            }
            eliminate(&mut particles, cfg, &mut rng);
        }
    }
    Ok(particles.into_iter().map(|p| p.bounds).collect())
}
