//! Scenario parameters, unit handling and the derived two-tier geometry.
//!
//! Everything inside the crate works in one unit system: meters, watts,
//! linear bias, m/s and base stations per square meter. User-facing values
//! (dBm, dB, km/h, BS/km²) are converted once by [`normalize_units`].

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::ConfigError;

/// Baseline scenario shipped with the toolkit.
pub const DEFAULT_CONFIG_TOML: &str = include_str!("default_config.toml");

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn kmh_to_ms(kmh: f64) -> f64 {
    kmh / 3.6
}

/// BS/km² to BS/m².
pub fn per_km2_to_per_m2(lambda: f64) -> f64 {
    lambda * 1e-6
}

/// One network tier in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct TierParams {
    pub id: String,
    /// BS per m².
    pub lambda: f64,
    /// Watts.
    pub power: f64,
    /// Linear association bias.
    pub bias: f64,
    /// Antenna height, meters.
    pub height: f64,
}

impl TierParams {
    /// Builds a tier from user-facing units (BS/km², dBm, dB, m).
    pub fn from_user_units(
        id: impl Into<String>,
        lambda_per_km2: f64,
        power_dbm: f64,
        bias_db: f64,
        height_m: f64,
    ) -> Result<Self, ConfigError> {
        let id = id.into();
        for (name, v) in [
            ("lambda_per_km2", lambda_per_km2),
            ("power_dbm", power_dbm),
            ("bias_db", bias_db),
            ("height_m", height_m),
        ] {
            if !v.is_finite() {
                return Err(ConfigError::invalid(format!("tiers.{id}.{name}"), "must be finite"));
            }
        }
        let tier = TierParams {
            lambda: per_km2_to_per_m2(lambda_per_km2),
            power: dbm_to_watts(power_dbm),
            bias: db_to_linear(bias_db),
            height: height_m,
            id,
        };
        tier.validate()?;
        Ok(tier)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let field = |name: &str| format!("tiers.{}.{}", self.id, name);
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(ConfigError::invalid(field("lambda"), "intensity must be non-negative"));
        }
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(ConfigError::invalid(field("power"), "power must be positive"));
        }
        if !(self.bias.is_finite() && self.bias > 0.0) {
            return Err(ConfigError::invalid(field("bias"), "bias must be positive"));
        }
        if !(self.height.is_finite() && self.height >= 0.0) {
            return Err(ConfigError::invalid(field("height"), "height must be non-negative"));
        }
        Ok(())
    }

    /// `(B·P)^(2/η)`: squared association distances scale with this weight.
    pub fn association_weight(&self, eta: f64) -> f64 {
        (self.bias * self.power).powf(2.0 / eta)
    }

    /// Vertical separation between this tier's antennas and a user at `user_height`.
    pub fn effective_height(&self, user_height: f64) -> f64 {
        (user_height - self.height).abs()
    }
}

/// Trajectory shape used by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryKind {
    #[default]
    Straight,
    RandomWaypoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSettings {
    pub realizations: usize,
    /// Trajectory length per realization, meters.
    pub trajectory_length: f64,
    /// Scan step along the trajectory, meters.
    pub step: f64,
    /// Guard band override in meters; `None` uses `5/sqrt(π·λ_min)`.
    pub guard: Option<f64>,
    pub trajectory: TrajectoryKind,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            realizations: 200,
            trajectory_length: 20_000.0,
            step: 0.05,
            guard: None,
            trajectory: TrajectoryKind::Straight,
        }
    }
}

impl SimSettings {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.realizations == 0 {
            return Err(ConfigError::invalid("sim.realizations", "must be positive"));
        }
        if !(self.trajectory_length.is_finite() && self.trajectory_length >= 0.0) {
            return Err(ConfigError::invalid("sim.trajectory_km", "must be non-negative"));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(ConfigError::invalid("sim.step_m", "must be positive"));
        }
        if let Some(g) = self.guard {
            if !(g.is_finite() && g > 0.0) {
                return Err(ConfigError::invalid("sim.guard_m", "must be positive"));
            }
        }
        Ok(())
    }
}

/// A fully normalized scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub tiers: Vec<TierParams>,
    /// Meters.
    pub user_height: f64,
    /// m/s.
    pub velocity: f64,
    pub eta: f64,
    pub seed: u64,
    pub sim: SimSettings,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.tiers.is_empty() {
            return Err(ConfigError::invalid("tiers", "at least one tier is required"));
        }
        for t in &self.tiers {
            t.validate()?;
        }
        if !self.tiers.iter().any(|t| t.lambda > 0.0) {
            return Err(ConfigError::invalid("tiers", "at least one tier needs a positive intensity"));
        }
        if !(self.eta.is_finite() && self.eta > 2.0) {
            return Err(ConfigError::invalid("eta", "path-loss exponent must exceed 2"));
        }
        if !(self.user_height.is_finite() && self.user_height >= 0.0) {
            return Err(ConfigError::invalid("user.height_m", "must be non-negative"));
        }
        if !(self.velocity.is_finite() && self.velocity >= 0.0) {
            return Err(ConfigError::invalid("user.velocity_kmh", "must be non-negative"));
        }
        self.sim.validate()
    }

    /// Baseline scenario with a pedestrian user at 1.5 m.
    pub fn baseline() -> Self {
        RawConfig::default_baseline()
            .normalize()
            .expect("shipped default config is valid")
    }

    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(s)?;
        raw.normalize()
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(path.display().to_string(), e))?;
        Self::from_toml_str(&text)
    }

    pub fn min_positive_lambda(&self) -> f64 {
        self.tiers
            .iter()
            .map(|t| t.lambda)
            .filter(|&l| l > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn with_user_height(mut self, h: f64) -> Self {
        self.user_height = h;
        self
    }
}

// ---------------------------------------------------------------------------
// User-facing config file

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawTier {
    pub id: String,
    pub lambda_per_km2: f64,
    pub power_dbm: f64,
    #[serde(default)]
    pub bias_db: f64,
    pub height_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawUser {
    pub height_m: f64,
    pub velocity_kmh: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawSim {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default = "default_trajectory_km")]
    pub trajectory_km: f64,
    #[serde(default = "default_step_m")]
    pub step_m: f64,
    #[serde(default)]
    pub guard_m: Option<f64>,
    #[serde(default)]
    pub trajectory: TrajectoryKind,
}

fn default_realizations() -> usize {
    SimSettings::default().realizations
}
fn default_trajectory_km() -> f64 {
    SimSettings::default().trajectory_length / 1000.0
}
fn default_step_m() -> f64 {
    SimSettings::default().step
}

impl Default for RawSim {
    fn default() -> Self {
        RawSim {
            seed: 0,
            realizations: default_realizations(),
            trajectory_km: default_trajectory_km(),
            step_m: default_step_m(),
            guard_m: None,
            trajectory: TrajectoryKind::Straight,
        }
    }
}

/// Config as written on disk: `eta` at the top level plus `[tiers.N]`,
/// `[user]` and `[sim]` sections. Tier order follows the numeric key.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub eta: f64,
    pub user: RawUser,
    pub tiers: BTreeMap<String, RawTier>,
    #[serde(default)]
    pub sim: RawSim,
}

impl RawConfig {
    pub fn default_baseline() -> Self {
        toml::from_str(DEFAULT_CONFIG_TOML).expect("shipped default config parses")
    }

    pub fn normalize(&self) -> Result<ScenarioConfig, ConfigError> {
        normalize_units(self)
    }
}

/// Converts a user-facing config to internal units and validates it.
pub fn normalize_units(raw: &RawConfig) -> Result<ScenarioConfig, ConfigError> {
    let mut keyed = Vec::with_capacity(raw.tiers.len());
    for (key, tier) in &raw.tiers {
        let idx: usize = key
            .parse()
            .map_err(|_| ConfigError::invalid(format!("tiers.{key}"), "tier key must be a non-negative integer"))?;
        keyed.push((idx, tier));
    }
    keyed.sort_by_key(|(i, _)| *i);
    let tiers = keyed
        .into_iter()
        .map(|(_, t)| TierParams::from_user_units(&t.id, t.lambda_per_km2, t.power_dbm, t.bias_db, t.height_m))
        .collect::<Result<Vec<_>, _>>()?;

    for (name, v) in [
        ("eta", raw.eta),
        ("user.height_m", raw.user.height_m),
        ("user.velocity_kmh", raw.user.velocity_kmh),
        ("sim.trajectory_km", raw.sim.trajectory_km),
        ("sim.step_m", raw.sim.step_m),
    ] {
        if !v.is_finite() {
            return Err(ConfigError::invalid(name, "must be finite"));
        }
    }

    let cfg = ScenarioConfig {
        tiers,
        user_height: raw.user.height_m,
        velocity: kmh_to_ms(raw.user.velocity_kmh),
        eta: raw.eta,
        seed: raw.sim.seed,
        sim: SimSettings {
            realizations: raw.sim.realizations,
            trajectory_length: raw.sim.trajectory_km * 1000.0,
            step: raw.sim.step_m,
            guard: raw.sim.guard_m,
            trajectory: raw.sim.trajectory,
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

// ---------------------------------------------------------------------------
// Derived pair geometry

/// Quantities shared by every two-tier formula, seen from tier `k`
/// (serving) towards tier `j` (neighbor).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry {
    pub k: usize,
    pub j: usize,
    /// `(B_k P_k / B_j P_j)^(2/η)`.
    pub beta_kj: f64,
    pub beta_jk: f64,
    /// BS/m².
    pub lambda_k: f64,
    pub lambda_j: f64,
    /// `λ_k / (λ_k + λ_j β_jk)`.
    pub lambda_kj: f64,
    pub h_uk: f64,
    pub h_uj: f64,
    /// Horizontal serving distance below which tier `k` faces no competition
    /// from tier `j` (0 when no such region exists).
    pub l_k: f64,
    pub l_j: f64,
}

impl PairGeometry {
    pub fn from_tiers(
        k: usize,
        tier_k: &TierParams,
        j: usize,
        tier_j: &TierParams,
        user_height: f64,
        eta: f64,
    ) -> Self {
        let same = k == j;
        let h_uk = tier_k.effective_height(user_height);
        let h_uj = tier_j.effective_height(user_height);
        let (beta_kj, beta_jk) = if same {
            (1.0, 1.0)
        } else {
            let b = tier_k.association_weight(eta) / tier_j.association_weight(eta);
            (b, 1.0 / b)
        };
        let lambda_k = tier_k.lambda;
        let lambda_j = tier_j.lambda;
        let denom = lambda_k + lambda_j * beta_jk;
        let lambda_kj = if denom > 0.0 { lambda_k / denom } else { 0.0 };
        let (l_k, l_j) = if same {
            (0.0, 0.0)
        } else {
            (
                regime_threshold(beta_kj, h_uk, h_uj),
                regime_threshold(beta_jk, h_uj, h_uk),
            )
        };
        PairGeometry { k, j, beta_kj, beta_jk, lambda_k, lambda_j, lambda_kj, h_uk, h_uj, l_k, l_j }
    }

    pub fn is_intra(&self) -> bool {
        self.k == self.j
    }

    /// The same pair seen from tier `j`.
    pub fn swapped(&self) -> Self {
        let denom = self.lambda_j + self.lambda_k * self.beta_kj;
        PairGeometry {
            k: self.j,
            j: self.k,
            beta_kj: self.beta_jk,
            beta_jk: self.beta_kj,
            lambda_k: self.lambda_j,
            lambda_j: self.lambda_k,
            lambda_kj: if denom > 0.0 { self.lambda_j / denom } else { 0.0 },
            h_uk: self.h_uj,
            h_uj: self.h_uk,
            l_k: self.l_j,
            l_j: self.l_k,
        }
    }

    /// Squared horizontal radius of the disc that must be free of tier-`j`
    /// BSs when tier `k` serves from horizontal distance `r`. Negative when
    /// no tier-`j` BS could compete at all.
    pub fn exclusion_radius_sq(&self, r: f64) -> f64 {
        self.beta_jk * (r * r + self.h_uk * self.h_uk) - self.h_uj * self.h_uj
    }
}

/// `sqrt(β_kj h_uj² − h_uk²)` clamped at zero.
///
/// Exactly one of the two thresholds of a pair can be positive.
fn regime_threshold(beta_kj: f64, h_uk: f64, h_uj: f64) -> f64 {
    (beta_kj * h_uj * h_uj - h_uk * h_uk).max(0.0).sqrt()
}

/// Derived geometry for tiers `k` and `j` of `config`.
pub fn pair_geometry(config: &ScenarioConfig, k: usize, j: usize) -> PairGeometry {
    PairGeometry::from_tiers(k, &config.tiers[k], j, &config.tiers[j], config.user_height, config.eta)
}

// ---------------------------------------------------------------------------
// Association metric

/// Exponent-free association metric: `d² / (B·P)^(2/η)` with `d` the 3D
/// distance. Smaller is better; ordering matches `B·P·d^(−η)` reversed.
pub fn biased_rss_metric(user: [f64; 3], bs: [f64; 3], tier: &TierParams, eta: f64) -> f64 {
    let d2 = (user[0] - bs[0]).powi(2) + (user[1] - bs[1]).powi(2) + (user[2] - bs[2]).powi(2);
    d2 / tier.association_weight(eta)
}

/// A candidate serving BS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BsRef {
    pub tier: usize,
    pub id: usize,
}

/// True when `(metric_a, a)` beats `(metric_b, b)`: lower metric wins, ties
/// go to the lower tier index, then the lower BS index.
#[inline]
pub fn beats(metric_a: f64, a: BsRef, metric_b: f64, b: BsRef) -> bool {
    metric_a < metric_b || (metric_a == metric_b && a < b)
}
