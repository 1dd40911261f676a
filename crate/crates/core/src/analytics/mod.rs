//! Height-aware analytical engine for two tiers.
//!
//! Tier 0 plays the role of "m" and tier 1 of "s" in column names, but
//! nothing in the formulas assumes which tier is higher or stronger.

mod association;
mod boundary;
mod density;
mod report;

pub use association::{association_probabilities, association_split, AssociationSplit};
pub use boundary::{area_intensity_inter, area_intensity_intra, vartheta, BoundaryIntensity};
pub use density::{service_distance_density, ServiceDistanceDensity};
pub use report::{handover_report, HandoverReport};

use crate::model::{PairGeometry, ScenarioConfig, TierParams};
use crate::quadrature::{QuadratureError, QuadratureSettings};
use crate::ConfigError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("the analytical engine handles exactly 2 tiers, got {0}")]
    TierCount(usize),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadratureError),
    #[error("negative ring radicand {value:e} at r = {r} m, θ = {theta}")]
    InconsistentRadicand { r: f64, theta: f64, value: f64 },
}

/// Tolerances for the radial (outer) and angular (inner) integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSettings {
    pub outer: QuadratureSettings,
    pub inner: QuadratureSettings,
}

impl Default for AnalyticSettings {
    fn default() -> Self {
        AnalyticSettings {
            outer: QuadratureSettings::default().with_rel_tol(1e-10).with_max_subdivisions(400),
            inner: QuadratureSettings::default().with_rel_tol(1e-12).with_max_subdivisions(200),
        }
    }
}

/// Everything the engine derives for one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticResult {
    pub association: [AssociationSplit; 2],
    pub intra: [BoundaryIntensity; 2],
    pub inter: BoundaryIntensity,
    pub report: HandoverReport,
}

/// Two-tier scenario evaluated by the analytical engine.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTierModel {
    tiers: [TierParams; 2],
    user_height: f64,
    eta: f64,
    settings: AnalyticSettings,
}

impl TwoTierModel {
    pub fn new(tiers: [TierParams; 2], user_height: f64, eta: f64) -> Result<Self, AnalyticsError> {
        for t in &tiers {
            t.validate()?;
        }
        if !(eta.is_finite() && eta > 2.0) {
            return Err(ConfigError::invalid("eta", "path-loss exponent must exceed 2").into());
        }
        if !(user_height.is_finite() && user_height >= 0.0) {
            return Err(ConfigError::invalid("user.height_m", "must be non-negative").into());
        }
        if tiers.iter().all(|t| t.lambda == 0.0) {
            return Err(ConfigError::invalid("tiers", "at least one tier needs a positive intensity").into());
        }
        Ok(TwoTierModel { tiers, user_height, eta, settings: AnalyticSettings::default() })
    }

    pub fn from_config(config: &ScenarioConfig) -> Result<Self, AnalyticsError> {
        match config.tiers.as_slice() {
            [a, b] => Self::new([a.clone(), b.clone()], config.user_height, config.eta),
            other => Err(AnalyticsError::TierCount(other.len())),
        }
    }

    pub fn with_settings(mut self, settings: AnalyticSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn settings(&self) -> &AnalyticSettings {
        &self.settings
    }

    pub fn tiers(&self) -> &[TierParams; 2] {
        &self.tiers
    }

    pub fn user_height(&self) -> f64 {
        self.user_height
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Same powers, biases and intensities with user and antennas at one height.
    pub fn flattened(&self) -> Self {
        let mut flat = self.clone();
        for t in &mut flat.tiers {
            t.height = 0.0;
        }
        flat.user_height = 0.0;
        flat
    }

    /// Geometry seen from tier `k` towards tier `j`.
    pub fn geometry(&self, k: usize, j: usize) -> PairGeometry {
        PairGeometry::from_tiers(k, &self.tiers[k], j, &self.tiers[j], self.user_height, self.eta)
    }

    pub fn association(&self) -> [AssociationSplit; 2] {
        association_probabilities(&self.geometry(0, 1))
    }

    /// Serving-distance law of tier `k` against the other tier.
    pub fn density(&self, k: usize) -> ServiceDistanceDensity {
        service_distance_density(&self.geometry(k, 1 - k))
    }

    pub fn vartheta(&self, k: usize, j: usize, r: f64) -> Result<f64, AnalyticsError> {
        vartheta(&self.geometry(k, j), r, &self.settings.inner)
    }

    pub fn inter_intensity(&self) -> Result<BoundaryIntensity, AnalyticsError> {
        let (dk, dj) = (self.density(0), self.density(1));
        area_intensity_inter([&dk, &dj], &self.settings.outer, &self.settings.inner)
    }

    pub fn intra_intensity(&self, k: usize) -> Result<BoundaryIntensity, AnalyticsError> {
        area_intensity_intra(&self.density(k), &self.settings.outer)
    }

    /// Full pipeline: association, boundary intensities and handover rates.
    pub fn evaluate(&self, velocity: f64) -> Result<AnalyticResult, AnalyticsError> {
        let intra = [self.intra_intensity(0)?, self.intra_intensity(1)?];
        let inter = self.inter_intensity()?;
        let report = handover_report([&intra[0], &intra[1]], &inter, velocity);
        Ok(AnalyticResult { association: self.association(), intra, inter, report })
    }

    pub fn handover_report(&self, velocity: f64) -> Result<HandoverReport, AnalyticsError> {
        Ok(self.evaluate(velocity)?.report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn single_tier(lambda_per_km2: f64) -> TwoTierModel {
        let a = TierParams::from_user_units("a", lambda_per_km2, 30.0, 0.0, 0.0).unwrap();
        let b = TierParams::from_user_units("b", 0.0, 30.0, 0.0, 0.0).unwrap();
        TwoTierModel::new([a, b], 0.0, 4.0).unwrap()
    }

    #[test]
    fn rejects_wrong_tier_count() {
        let mut cfg = ScenarioConfig::baseline();
        cfg.tiers.pop();
        assert!(matches!(TwoTierModel::from_config(&cfg), Err(AnalyticsError::TierCount(1))));
    }

    #[test]
    fn single_tier_reduces_to_poisson_voronoi() {
        let m = single_tier(10.0);
        let intra = m.intra_intensity(0).unwrap();
        let expected = 2.0 * (1e-5f64).sqrt();
        assert!((intra.length_intensity - expected).abs() < 1e-9 * expected);
        let inter = m.inter_intensity().unwrap();
        assert_eq!(inter.length_intensity, 0.0);
        let r = m.handover_report(30.0 / 3.6).unwrap();
        assert!((r.hol_total() * 1000.0 - 4.0264).abs() < 1e-4);
        assert!((r.rate_total() * 3600.0 - 120.79).abs() < 1e-2);
    }

    #[test]
    fn inter_sides_carry_equal_weight() {
        // Each side of a kj boundary is the serving side of one of the two
        // tiers, so both contributions equal half the length intensity.
        let cfg = ScenarioConfig::baseline();
        for hu in [0.0, 1.5, 25.0, 32.5, 40.0, 60.0] {
            let m = TwoTierModel::from_config(&cfg.clone().with_user_height(hu)).unwrap();
            let b = m.inter_intensity().unwrap();
            let [a, c] = b.terms;
            assert!((a - c).abs() < 1e-8 * a, "h_u={hu}: {a} vs {c}");
        }
    }

    #[test]
    fn relabeling_tiers_keeps_inter_total() {
        let cfg = ScenarioConfig::baseline();
        let m = TwoTierModel::from_config(&cfg).unwrap();
        let swapped = TwoTierModel::new([cfg.tiers[1].clone(), cfg.tiers[0].clone()], cfg.user_height, cfg.eta).unwrap();
        let a = m.inter_intensity().unwrap().length_intensity;
        let b = swapped.inter_intensity().unwrap().length_intensity;
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn intra_vanishes_with_intensity() {
        let m = single_tier(10.0);
        assert_eq!(m.intra_intensity(1).unwrap().length_intensity, 0.0);
        assert_eq!(m.association()[1].a_k, 0.0);
    }

    #[test]
    fn flat_two_tier_closed_forms() {
        let cfg = ScenarioConfig::baseline();
        let m = TwoTierModel::from_config(&cfg).unwrap().flattened();
        let r = m.evaluate(1.0).unwrap();
        let (lm, ls) = (3e-6, 1e-5);
        let b = m.geometry(0, 1).beta_kj;
        let cap_m = lm + ls / b;
        let mu_mm = 2.0 * lm * lm / cap_m.powf(1.5);
        assert!((r.intra[0].length_intensity - mu_mm).abs() < 1e-9 * mu_mm);
        assert!(r.report.hol[0][0] > 0.0 && r.report.hol[0][1] > 0.0);
        assert!((r.association[0].a_k - lm / cap_m).abs() < 1e-14);
        let _ = PI;
    }
}
