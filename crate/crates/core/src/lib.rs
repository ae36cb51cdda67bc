//! Simulation and controller-tuning workbench for a bench-top 3-DOF helicopter.
//!
//! The crate provides:
//!
//! - [`plant`]: the nonlinear rigid-body dynamics of the twin-rotor apparatus
//!   with a fixed-step RK4 integrator and angle saturation,
//! - [`decoupling`]: the virtual-input transformation that turns the
//!   underactuated two-force system into three decoupled channels,
//! - [`fuzzy`]: per-axis adaptive fuzzy controllers with Lyapunov-based
//!   weight adaptation,
//! - [`pid`]: a classical PID baseline running through the same decoupling,
//! - [`swarm`]: standard particle swarm optimization plus a modified variant
//!   with per-particle search-space adaptation and periodic elimination,
//! - [`experiments`]: scenario definitions, the closed-loop runner, and the
//!   RMSE/IACS metrics that form the tuning objective,
//! - [`campaign`]: multi-seed optimizer comparisons,
//! - [`stats`]: Wilcoxon signed-rank and Friedman-rank analysis.

pub mod campaign;
pub mod decoupling;
pub mod experiments;
pub mod fuzzy;
pub mod pid;
pub mod plant;
pub mod stats;
pub mod swarm;

pub use experiments::{RunRecord, Scenario};
pub use plant::{ControlInputs, HelicopterState, ModelParams};
pub use swarm::{Bounds, SwarmConfig};
