//! Parameter sweeps, cross-validation between the two engines, and plot
//! scripts for the resulting CSV files.

mod plot;
mod sweep;
mod validate;

pub use plot::{emit_plot_script, plot_script_source};
pub use sweep::{run_sweep, Engines, McBudget, SweepOutput, SweepPoint, SweepSpec, SweepVariable};
pub use validate::{validate, ValidationOptions, ValidationReport, ValidationRow};

use crate::sim::SimError;
use crate::{AnalyticsError, ConfigError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV has no data rows")]
    EmptyCsv,
    #[error("CSV is missing columns: {}", .0.join(", "))]
    MissingColumns(Vec<String>),
}

/// Row/column labels of the two tiers.
pub(crate) const TIER_LETTERS: [&str; 2] = ["m", "s"];

/// Directed handover types in column order.
pub(crate) const HO_TYPES: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

pub(crate) fn ho_label(k: usize, j: usize) -> String {
    format!("{}{}", TIER_LETTERS[k], TIER_LETTERS[j])
}

/// Shortest round-trip decimal representation; stable across runs.
pub(crate) fn fmt_num(x: f64) -> String {
    format!("{x}")
}
