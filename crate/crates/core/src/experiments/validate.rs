use super::{fmt_num, ho_label, ExperimentError, HO_TYPES};
use crate::model::ScenarioConfig;
use crate::sim::estimate;
use crate::TwoTierModel;
use std::fmt;

/// One analytical-vs-simulated comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub point: String,
    pub quantity: String,
    pub analytical: f64,
    pub mc: f64,
    pub ci_halfwidth: f64,
    pub rel_error: f64,
    pub pass: bool,
}

impl ValidationRow {
    fn new(point: &str, quantity: String, analytical: f64, mc: f64, ci_halfwidth: f64, tol: f64) -> Self {
        let diff = (analytical - mc).abs();
        let rel_error = if analytical != 0.0 { diff / analytical.abs() } else { diff };
        ValidationRow {
            point: point.to_string(),
            quantity,
            analytical,
            mc,
            ci_halfwidth,
            rel_error,
            pass: diff <= ci_halfwidth.max(tol * analytical.abs()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOptions {
    /// Relative tolerance floor.
    pub tol: f64,
    pub realizations: usize,
    /// Meters per realization.
    pub trajectory_length: f64,
    /// Mutation hook: scales β_ms in the analytical engine only (via the
    /// tier-0 power) so that a broken model must be caught.
    pub beta_mutation: Option<f64>,
}

impl ValidationOptions {
    pub fn from_config(config: &ScenarioConfig) -> Self {
        ValidationOptions {
            tol: 0.05,
            realizations: config.sim.realizations,
            trajectory_length: config.sim.trajectory_length,
            beta_mutation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<18} {:<10} {:>14} {:>14} {:>12} {:>9}  result",
            "point", "quantity", "analytical", "mc", "ci95", "rel_err"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<18} {:<10} {:>14.6} {:>14.6} {:>12.6} {:>8.3}%  {}",
                r.point,
                r.quantity,
                r.analytical,
                r.mc,
                r.ci_halfwidth,
                100.0 * r.rel_error,
                if r.pass { "pass" } else { "FAIL" }
            )?;
        }
        let failed = self.failures().count();
        write!(f, "{} rows, {} failed", self.rows.len(), failed)
    }
}

impl ValidationReport {
    pub fn to_csv_string(&self) -> Result<String, ExperimentError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["point", "quantity", "analytical", "mc", "ci_halfwidth", "rel_error", "pass"])?;
        for r in &self.rows {
            w.write_record([
                r.point.clone(),
                r.quantity.clone(),
                fmt_num(r.analytical),
                fmt_num(r.mc),
                fmt_num(r.ci_halfwidth),
                fmt_num(r.rel_error),
                r.pass.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| ExperimentError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }
}

/// The pinned validation grid derived from `config`: flat heights, a single
/// tier, the configured point, and user heights 0, 32.5 and 40 m.
fn grid(config: &ScenarioConfig) -> Vec<(String, ScenarioConfig, bool)> {
    let mut points = Vec::new();
    let mut flat = config.clone();
    for t in &mut flat.tiers {
        t.height = 0.0;
    }
    flat.user_height = 0.0;
    points.push(("flat".to_string(), flat, false));
    let mut single = config.clone();
    single.tiers[1].lambda = 0.0;
    points.push(("single-tier".to_string(), single, true));
    points.push((format!("config h_u={}", config.user_height), config.clone(), false));
    for hu in [0.0, 32.5, 40.0] {
        points.push((format!("h_u={hu}"), config.clone().with_user_height(hu), false));
    }
    points
}

/// Runs both engines over the validation grid.
pub fn validate(config: &ScenarioConfig, options: &ValidationOptions) -> Result<ValidationReport, ExperimentError> {
    config.validate()?;
    if config.tiers.len() != 2 {
        return Err(ExperimentError::InvalidSpec("validation needs exactly 2 tiers".into()));
    }
    let mut rows = Vec::new();
    for (name, mut cfg, single) in grid(config) {
        cfg.sim.realizations = options.realizations;
        cfg.sim.trajectory_length = options.trajectory_length;
        let mut analytic_cfg = cfg.clone();
        if let Some(factor) = options.beta_mutation {
            analytic_cfg.tiers[0].power *= factor.powf(cfg.eta / 2.0);
        }
        let model = TwoTierModel::from_config(&analytic_cfg)?;
        let result = model.evaluate(cfg.velocity)?;
        let mc = estimate(&cfg, options.realizations)?;
        let tol = options.tol;
        let total = mc.hol_total()?.scaled(1e3);
        if single {
            let a = &mc.association[0];
            rows.push(ValidationRow::new(&name, "A_m".into(), result.association[0].a_k, a.value, a.ci_halfwidth, tol));
            rows.push(ValidationRow::new(&name, "HOL_total".into(), result.report.hol_total() * 1e3, total.value, total.ci_halfwidth, tol));
            continue;
        }
        for (k, label) in ["A_m", "A_s"].iter().enumerate() {
            let a = &mc.association[k];
            rows.push(ValidationRow::new(&name, label.to_string(), result.association[k].a_k, a.value, a.ci_halfwidth, tol));
        }
        for &(k, j) in &HO_TYPES {
            let e = mc.hol(k, j)?.scaled(1e3);
            rows.push(ValidationRow::new(&name, format!("HOL_{}", ho_label(k, j)), result.report.hol_per_km(k, j), e.value, e.ci_halfwidth, tol));
        }
        rows.push(ValidationRow::new(&name, "HOL_total".into(), result.report.hol_total() * 1e3, total.value, total.ci_halfwidth, tol));
    }
    Ok(ValidationReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule_uses_larger_of_ci_and_tolerance() {
        assert!(ValidationRow::new("p", "q".into(), 1.0, 1.04, 0.01, 0.05).pass);
        assert!(ValidationRow::new("p", "q".into(), 1.0, 1.08, 0.1, 0.05).pass);
        assert!(!ValidationRow::new("p", "q".into(), 1.0, 1.08, 0.01, 0.05).pass);
    }

    #[test]
    fn grid_covers_both_height_regimes() {
        let g = grid(&ScenarioConfig::baseline());
        assert_eq!(g.len(), 6);
        let heights: Vec<f64> = g.iter().map(|(_, c, _)| c.user_height).collect();
        assert!(heights.contains(&0.0) && heights.contains(&40.0));
        assert_eq!(g[1].1.tiers[1].lambda, 0.0);
    }

    #[test]
    fn report_rendering() {
        let rep = ValidationReport { rows: vec![ValidationRow::new("p", "A_m".into(), 0.5, 0.6, 0.01, 0.05)] };
        assert!(!rep.passed());
        let text = rep.to_string();
        assert!(text.contains("FAIL") && text.ends_with("1 rows, 1 failed"));
        assert!(rep.to_csv_string().unwrap().starts_with("point,quantity,analytical,mc,ci_halfwidth,rel_error,pass\n"));
    }
}
