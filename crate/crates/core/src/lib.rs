//! Handover rates and user association in height-aware two-tier
//! ultra-dense cellular networks.
//!
//! Two independent engines live here:
//!
//! * [`analytics`] evaluates the stochastic-geometry expressions for
//!   association probabilities, serving-distance densities and cell-boundary
//!   intensities by numerical quadrature.
//! * [`sim`] samples Poisson deployments, walks a user along trajectories and
//!   counts biased-RSS association changes.
//!
//! [`experiments`] sweeps parameters, cross-validates the two engines and
//! writes CSV artifacts.

pub mod analytics;
pub mod experiments;
pub mod model;
pub mod quadrature;
pub mod sim;

pub use analytics::{AnalyticsError, TwoTierModel};
pub use model::{ScenarioConfig, SimSettings, TierParams};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot read {0}: {1}")]
    Io(String, #[source] std::io::Error),
}

impl ConfigError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid { field: field.into(), reason: reason.into() }
    }
}
