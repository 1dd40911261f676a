//! Browser bindings for the handover-rate engine.
//!
//! Every entry point takes a JSON parameter object and returns a JSON
//! string, so the page needs no generated TypeScript types. The same
//! functions are plain Rust for native tests.

use serde::{Deserialize, Serialize};
use udn_handover::model::{kmh_to_ms, ScenarioConfig, TrajectoryKind};
use udn_handover::sim::{realization_trajectory, sample_deployment, walk_and_log, window_side};
use udn_handover::{TierParams, TwoTierModel};
use wasm_bindgen::prelude::*;

/// Scenario knobs exposed on the page. Missing fields take the shipped defaults.
#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct Scenario {
    pub lambda_m: f64,
    pub lambda_s: f64,
    pub power_m_dbm: f64,
    pub power_s_dbm: f64,
    pub bias_sm_db: f64,
    pub height_m: f64,
    pub height_s: f64,
    pub user_height: f64,
    pub velocity_kmh: f64,
    pub eta: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            lambda_m: 3.0,
            lambda_s: 10.0,
            power_m_dbm: 46.0,
            power_s_dbm: 24.0,
            bias_sm_db: 0.0,
            height_m: 40.0,
            height_s: 25.0,
            user_height: 1.5,
            velocity_kmh: 30.0,
            eta: 4.0,
        }
    }
}

impl Scenario {
    fn config(&self) -> Result<ScenarioConfig, String> {
        let mut cfg = ScenarioConfig::baseline();
        cfg.tiers = vec![
            TierParams::from_user_units("macro", self.lambda_m, self.power_m_dbm, 0.0, self.height_m).map_err(|e| e.to_string())?,
            TierParams::from_user_units("small", self.lambda_s, self.power_s_dbm, self.bias_sm_db, self.height_s)
                .map_err(|e| e.to_string())?,
        ];
        cfg.user_height = self.user_height;
        cfg.velocity = kmh_to_ms(self.velocity_kmh);
        cfg.eta = self.eta;
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

#[derive(Debug, Deserialize)]
struct HeightSweep {
    #[serde(default)]
    scenario: Scenario,
    #[serde(default)]
    h_min: f64,
    #[serde(default = "default_h_max")]
    h_max: f64,
    #[serde(default = "default_points")]
    points: usize,
}

fn default_h_max() -> f64 {
    60.0
}

fn default_points() -> usize {
    61
}

#[derive(Debug, Default, Serialize)]
struct HeightCurves {
    user_height: Vec<f64>,
    a_m: Vec<f64>,
    a_s: Vec<f64>,
    hol_mm: Vec<f64>,
    hol_ms: Vec<f64>,
    hol_sm: Vec<f64>,
    hol_ss: Vec<f64>,
    hol_total: Vec<f64>,
    hol_total_flat: f64,
    rate_total_per_hour: Vec<f64>,
}

/// Association probabilities and handover rates per km versus user height.
pub fn height_curves(params: &str) -> Result<String, String> {
    let p: HeightSweep = serde_json::from_str(params).map_err(|e| e.to_string())?;
    if p.h_min.is_nan() || p.h_max.is_nan() || p.h_max <= p.h_min || !(2..=400).contains(&p.points) {
        return Err("need h_max > h_min and 2..=400 points".into());
    }
    let cfg = p.scenario.config()?;
    let mut out = HeightCurves::default();
    let flat = TwoTierModel::from_config(&cfg).map_err(|e| e.to_string())?.flattened();
    out.hol_total_flat = flat.handover_report(cfg.velocity).map_err(|e| e.to_string())?.hol_total() * 1e3;
    for i in 0..p.points {
        let h = p.h_min + (p.h_max - p.h_min) * i as f64 / (p.points - 1) as f64;
        let model = TwoTierModel::from_config(&cfg.clone().with_user_height(h)).map_err(|e| e.to_string())?;
        let r = model.evaluate(cfg.velocity).map_err(|e| e.to_string())?;
        out.user_height.push(h);
        out.a_m.push(r.association[0].a_k);
        out.a_s.push(r.association[1].a_k);
        out.hol_mm.push(r.report.hol_per_km(0, 0));
        out.hol_ms.push(r.report.hol_per_km(0, 1));
        out.hol_sm.push(r.report.hol_per_km(1, 0));
        out.hol_ss.push(r.report.hol_per_km(1, 1));
        out.hol_total.push(r.report.hol_total() * 1e3);
        out.rate_total_per_hour.push(r.report.rate_total() * 3600.0);
    }
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
struct TierDensity {
    association: f64,
    near_share: f64,
    threshold_m: f64,
    /// Conditional density of the horizontal serving distance, per meter.
    pdf: Vec<f64>,
    cdf: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct DensityCurves {
    distance_m: Vec<f64>,
    macro_tier: TierDensity,
    small_tier: TierDensity,
}

/// Serving-distance densities of both tiers at the scenario's user height.
pub fn distance_densities(params: &str) -> Result<String, String> {
    let s: Scenario = serde_json::from_str(params).map_err(|e| e.to_string())?;
    let model = TwoTierModel::from_config(&s.config()?).map_err(|e| e.to_string())?;
    let lambda_min = [s.lambda_m, s.lambda_s].into_iter().filter(|&l| l > 0.0).fold(f64::INFINITY, f64::min) * 1e-6;
    let r_max = 3.0 / (std::f64::consts::PI * lambda_min).sqrt();
    let n = 300;
    let distance_m: Vec<f64> = (0..=n).map(|i| r_max * i as f64 / n as f64).collect();
    let tier = |k: usize| {
        let d = model.density(k);
        TierDensity {
            association: d.split.a_k,
            near_share: d.split.a_k1,
            threshold_m: d.threshold,
            pdf: distance_m.iter().map(|&x| d.conditional(x)).collect(),
            cdf: distance_m.iter().map(|&x| d.conditional_cdf(x)).collect(),
        }
    };
    let out = DensityCurves { macro_tier: tier(0), small_tier: tier(1), distance_m };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Debug, Deserialize)]
struct WalkParams {
    #[serde(default)]
    scenario: Scenario,
    #[serde(default = "default_walk_km")]
    trajectory_km: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    random_waypoint: bool,
}

fn default_walk_km() -> f64 {
    2.0
}

#[derive(Debug, Serialize)]
struct Event {
    x: f64,
    y: f64,
    s: f64,
    from_tier: usize,
    to_tier: usize,
}

#[derive(Debug, Serialize)]
struct Walk {
    window_side_m: f64,
    bs: [Vec<[f64; 2]>; 2],
    path: Vec<[f64; 2]>,
    events: Vec<Event>,
    /// Directed counts `[mm, ms, sm, ss]`.
    counts: [u64; 4],
    length_m: f64,
}

/// One random deployment with a user walk and its handover events.
pub fn simulate_walk(params: &str) -> Result<String, String> {
    let p: WalkParams = serde_json::from_str(params).map_err(|e| e.to_string())?;
    if !(p.trajectory_km > 0.0 && p.trajectory_km <= 20.0) {
        return Err("trajectory_km must be in (0, 20]".into());
    }
    let mut cfg = p.scenario.config()?;
    cfg.seed = p.seed;
    cfg.sim.trajectory_length = p.trajectory_km * 1e3;
    cfg.sim.trajectory = if p.random_waypoint { TrajectoryKind::RandomWaypoint } else { TrajectoryKind::Straight };
    let dep = sample_deployment(&cfg, 0);
    let traj = realization_trajectory(&cfg, 0);
    let log = walk_and_log(&dep, &traj, cfg.sim.step).map_err(|e| e.to_string())?;
    let mut path = vec![traj.legs[0].start];
    let mut s = 0.0;
    for leg in &traj.legs {
        s += leg.length;
        path.push(traj.point_at(s).expect("non-empty trajectory"));
    }
    let n = log.counts(2);
    let events = log
        .events
        .iter()
        .map(|e| {
            let [x, y] = traj.point_at(e.s).expect("non-empty trajectory");
            Event { x, y, s: e.s, from_tier: e.from.tier, to_tier: e.to.tier }
        })
        .collect();
    let out = Walk {
        window_side_m: window_side(&cfg),
        bs: [dep.tiers[0].positions.clone(), dep.tiers[1].positions.clone()],
        path,
        events,
        counts: [n[0][0], n[0][1], n[1][0], n[1][1]],
        length_m: log.exposure,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = heightCurves)]
pub fn height_curves_js(params: &str) -> Result<String, JsValue> {
    height_curves(params).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = distanceDensities)]
pub fn distance_densities_js(params: &str) -> Result<String, JsValue> {
    distance_densities(params).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = simulateWalk)]
pub fn simulate_walk_js(params: &str) -> Result<String, JsValue> {
    simulate_walk(params).map_err(|e| JsValue::from_str(&e))
}
