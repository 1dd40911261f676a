//! Monte Carlo engine: PPP deployments, trajectory walks and estimators.

pub mod deployment;
pub mod estimate;
pub mod grid;
pub mod walk;

pub use deployment::{guard_band, sample_deployment, window_side, Deployment, TierLayer};
pub use estimate::{estimate, estimate_with, write_events_csv, EstimateOptions, EventRecord, SimEstimate, SimReport};
pub use grid::SpatialGrid;
pub use walk::{realization_trajectory, sample_trajectory, walk_and_log, Crossing, CrossingLog, Leg, Trajectory, TrajectorySpec};

use crate::ConfigError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("deployment has no base stations")]
    EmptyDeployment,
    #[error("no trajectory exposure: handover rates are undefined")]
    InsufficientExposure,
    #[error("at least 2 realizations are needed for a confidence interval, got {0}")]
    TooFewRealizations(usize),
    #[error("bad trajectory: {0}")]
    BadTrajectory(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write events: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write events: {0}")]
    Csv(#[from] csv::Error),
}
