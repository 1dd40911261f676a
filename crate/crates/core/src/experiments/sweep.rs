use super::{fmt_num, ho_label, ExperimentError, HO_TYPES, TIER_LETTERS};
use crate::analytics::AnalyticResult;
use crate::model::{db_to_linear, linear_to_db, per_km2_to_per_m2, ScenarioConfig};
use crate::sim::{estimate, SimReport};
use crate::TwoTierModel;
use std::io::Write;

/// Swept scenario parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepVariable {
    /// User height, meters.
    UserHeight,
    /// Intensity of one tier, BS per km².
    TierIntensity { tier: usize },
    /// Bias of one tier relative to the other tier, dB.
    BiasDb { tier: usize },
}

impl SweepVariable {
    /// CSV column name.
    pub fn column(&self) -> String {
        match self {
            SweepVariable::UserHeight => "user_height_m".into(),
            SweepVariable::TierIntensity { tier } => format!("lambda_{}_per_km2", TIER_LETTERS[*tier]),
            SweepVariable::BiasDb { tier } => format!("bias_{}_db", ho_label(*tier, 1 - *tier)),
        }
    }

    fn apply(&self, cfg: &mut ScenarioConfig, value: f64) {
        match *self {
            SweepVariable::UserHeight => cfg.user_height = value,
            SweepVariable::TierIntensity { tier } => cfg.tiers[tier].lambda = per_km2_to_per_m2(value),
            SweepVariable::BiasDb { tier } => {
                cfg.tiers[tier].bias = cfg.tiers[1 - tier].bias * db_to_linear(value);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Engines {
    pub analytical: bool,
    pub simulator: bool,
}

/// Monte Carlo effort per sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McBudget {
    pub realizations: usize,
    /// Meters per realization.
    pub trajectory_length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scenario: ScenarioConfig,
    pub engines: Engines,
    pub mc: McBudget,
    /// Small-to-macro bias ratios in dB, one curve family each. Empty keeps
    /// the scenario's biases.
    pub bias_families_db: Vec<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::InvalidSpec(m.into()));
        if !(self.min.is_finite() && self.max.is_finite()) || self.min >= self.max {
            return bad("range needs min < max");
        }
        if self.points < 2 {
            return bad("at least 2 points are needed");
        }
        if !self.engines.analytical && !self.engines.simulator {
            return bad("no engine selected");
        }
        if self.scenario.tiers.len() != 2 {
            return bad("sweeps need exactly 2 tiers");
        }
        if let SweepVariable::TierIntensity { tier } | SweepVariable::BiasDb { tier } = self.variable {
            if tier > 1 {
                return bad("tier index must be 0 or 1");
            }
        }
        if matches!(self.variable, SweepVariable::BiasDb { .. }) && !self.bias_families_db.is_empty() {
            return bad("bias families cannot be combined with a bias sweep");
        }
        if self.engines.simulator && self.mc.realizations < 2 {
            return bad("the simulator needs at least 2 realizations");
        }
        self.scenario.validate()?;
        Ok(())
    }

    /// Evenly spaced sweep values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// Result of one sweep point; engine failures are kept per point.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub index: usize,
    pub value: f64,
    pub bias_sm_db: f64,
    pub scenario: ScenarioConfig,
    pub analytic: Option<Result<(AnalyticResult, f64), String>>,
    pub mc: Option<Result<SimReport, String>>,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub spec: SweepSpec,
    pub points: Vec<SweepPoint>,
}

/// Evaluates every point of `spec` with the requested engines.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput, ExperimentError> {
    spec.validate()?;
    let families: Vec<Option<f64>> = if spec.bias_families_db.is_empty() {
        vec![None]
    } else {
        spec.bias_families_db.iter().copied().map(Some).collect()
    };
    let mut points = Vec::new();
    for family in families {
        for value in spec.values() {
            let mut cfg = spec.scenario.clone();
            if let Some(db) = family {
                cfg.tiers[1].bias = cfg.tiers[0].bias * db_to_linear(db);
            }
            spec.variable.apply(&mut cfg, value);
            cfg.sim.realizations = spec.mc.realizations;
            cfg.sim.trajectory_length = spec.mc.trajectory_length;
            let bias_sm_db = linear_to_db(cfg.tiers[1].bias / cfg.tiers[0].bias);
            let analytic = spec.engines.analytical.then(|| evaluate_analytic(&cfg).map_err(|e| e.to_string()));
            let mc = spec
                .engines
                .simulator
                .then(|| estimate(&cfg, spec.mc.realizations).map_err(|e| e.to_string()));
            points.push(SweepPoint { index: points.len(), value, bias_sm_db, scenario: cfg, analytic, mc });
        }
    }
    Ok(SweepOutput { spec: spec.clone(), points })
}

/// Height-aware result plus the flat-height total, per meter.
fn evaluate_analytic(cfg: &ScenarioConfig) -> Result<(AnalyticResult, f64), ExperimentError> {
    let model = TwoTierModel::from_config(cfg)?;
    let result = model.evaluate(cfg.velocity)?;
    let flat = model.flattened().handover_report(cfg.velocity)?;
    Ok((result, flat.hol_total()))
}

impl SweepOutput {
    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["point".to_string(), self.spec.variable.column()];
        if !matches!(self.spec.variable, SweepVariable::BiasDb { .. }) {
            h.push("bias_sm_db".into());
        }
        let hol_names: Vec<String> = HO_TYPES.iter().map(|&(k, j)| format!("HOL_{}", ho_label(k, j))).collect();
        if self.spec.engines.analytical {
            h.extend(["A_m".to_string(), "A_s".to_string()]);
            h.extend(hol_names.iter().cloned());
            h.extend(["HOL_total".to_string(), "HOL_total_flat".to_string()]);
            h.extend(HO_TYPES.iter().map(|&(k, j)| format!("H_{}", ho_label(k, j))));
            h.push("H_total".into());
        }
        if self.spec.engines.simulator {
            for name in ["A_m", "A_s"].iter().map(|s| s.to_string()).chain(hol_names).chain(["HOL_total".to_string()]) {
                h.push(format!("{name}_mc"));
                h.push(format!("{name}_ci"));
            }
            h.push("exposure_km".into());
        }
        h.push("error".into());
        h
    }

    fn record(&self, p: &SweepPoint) -> Vec<String> {
        let mut r = vec![p.index.to_string(), fmt_num(p.value)];
        if !matches!(self.spec.variable, SweepVariable::BiasDb { .. }) {
            r.push(fmt_num(p.bias_sm_db));
        }
        let mut errors = Vec::new();
        match &p.analytic {
            None => {}
            Some(Ok((res, flat))) => {
                r.push(fmt_num(res.association[0].a_k));
                r.push(fmt_num(res.association[1].a_k));
                for &(k, j) in &HO_TYPES {
                    r.push(fmt_num(res.report.hol_per_km(k, j)));
                }
                r.push(fmt_num(res.report.hol_total() * 1e3));
                r.push(fmt_num(flat * 1e3));
                for &(k, j) in &HO_TYPES {
                    r.push(fmt_num(res.report.rate_per_hour(k, j)));
                }
                r.push(fmt_num(res.report.rate_total() * 3600.0));
            }
            Some(Err(e)) => {
                r.extend(std::iter::repeat_n(String::new(), 2 + 4 + 2 + 4 + 1));
                errors.push(format!("analytical: {e}"));
            }
        }
        match &p.mc {
            None => {}
            Some(Ok(rep)) => {
                let mut push = |v: f64, ci: f64| {
                    r.push(fmt_num(v));
                    r.push(fmt_num(ci));
                };
                for a in &rep.association[..2] {
                    push(a.value, a.ci_halfwidth);
                }
                let hols = HO_TYPES.iter().map(|&(k, j)| rep.hol(k, j)).chain([rep.hol_total()]);
                for h in hols {
                    match h {
                        Ok(e) => {
                            let e = e.scaled(1e3);
                            push(e.value, e.ci_halfwidth);
                        }
                        Err(_) => push(f64::NAN, f64::NAN),
                    }
                }
                r.push(fmt_num(rep.exposure / 1e3));
            }
            Some(Err(e)) => {
                r.extend(std::iter::repeat_n(String::new(), 2 * 7 + 1));
                errors.push(format!("simulator: {e}"));
            }
        }
        r.push(errors.join("; "));
        r
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ExperimentError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for p in &self.points {
            w.write_record(self.record(p))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String, ExperimentError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SweepSpec {
        let scenario = ScenarioConfig::baseline();
        SweepSpec {
            variable: SweepVariable::UserHeight,
            min: 0.0,
            max: 60.0,
            points: 5,
            engines: Engines { analytical: true, simulator: false },
            mc: McBudget { realizations: scenario.sim.realizations, trajectory_length: scenario.sim.trajectory_length },
            scenario,
            bias_families_db: Vec::new(),
        }
    }

    #[test]
    fn degenerate_range_rejected() {
        let mut s = spec();
        s.max = s.min;
        assert!(matches!(run_sweep(&s), Err(ExperimentError::InvalidSpec(_))));
        let mut s = spec();
        s.points = 1;
        assert!(run_sweep(&s).is_err());
    }

    #[test]
    fn values_include_endpoints() {
        assert_eq!(spec().values(), vec![0.0, 15.0, 30.0, 45.0, 60.0]);
    }

    #[test]
    fn analytic_only_csv_columns() {
        let out = run_sweep(&spec()).unwrap();
        let csv = out.to_csv_string().unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "point,user_height_m,bias_sm_db,A_m,A_s,HOL_mm,HOL_ms,HOL_sm,HOL_ss,HOL_total,HOL_total_flat,H_mm,H_ms,H_sm,H_ss,H_total,error"
        );
        assert_eq!(lines.count(), 5);
    }

    #[test]
    fn bias_families_multiply_points() {
        let mut s = spec();
        s.variable = SweepVariable::TierIntensity { tier: 1 };
        s.min = 10.0;
        s.max = 100.0;
        s.points = 3;
        s.bias_families_db = vec![0.0, 6.0];
        let out = run_sweep(&s).unwrap();
        assert_eq!(out.points.len(), 6);
        assert!((out.points[4].bias_sm_db - 6.0).abs() < 1e-12);
        assert!((out.points[4].scenario.tiers[1].lambda - 55e-6).abs() < 1e-18);
        assert_eq!(out.header()[1], "lambda_s_per_km2");
    }

    #[test]
    fn engine_failure_is_recorded_per_point() {
        let out = run_sweep(&spec()).unwrap();
        assert!(out.points.iter().all(|p| matches!(p.analytic, Some(Ok(_)))));
        let mut bad = out.clone();
        bad.points[0].analytic = Some(Err("boom".into()));
        let csv = bad.to_csv_string().unwrap();
        let row = csv.lines().nth(1).unwrap();
        assert!(row.ends_with("analytical: boom"));
        assert_eq!(row.split(',').count(), bad.header().len());
    }
}
