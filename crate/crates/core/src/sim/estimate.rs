use super::deployment::{guard_band, sample_deployment, stream_rng, window_side, Stream};
use super::walk::{sample_trajectory, walk_and_log, Crossing, TrajectorySpec};
use super::SimError;
use crate::model::ScenarioConfig;
use std::io::Write;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Monte Carlo point estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub value: f64,
    /// Events (rates) or drops served (association).
    pub count: u64,
    /// Meters of trajectory (rates) or number of drops (association).
    pub exposure: f64,
    /// 95% half-width from the across-realization variance.
    pub ci_halfwidth: f64,
}

impl SimEstimate {
    pub fn lower(&self) -> f64 {
        self.value - self.ci_halfwidth
    }

    pub fn upper(&self) -> f64 {
        self.value + self.ci_halfwidth
    }

    pub fn brackets(&self, x: f64) -> bool {
        self.lower() <= x && x <= self.upper()
    }

    /// Same estimate scaled, e.g. per meter to per kilometer.
    pub fn scaled(&self, factor: f64) -> Self {
        SimEstimate { value: self.value * factor, ci_halfwidth: self.ci_halfwidth * factor, ..*self }
    }

    /// Fraction of `n` drops with a success count `hits`.
    fn proportion(hits: u64, n: usize) -> Self {
        let p = hits as f64 / n as f64;
        let var = p * (1.0 - p) / (n as f64 - 1.0);
        SimEstimate { value: p, count: hits, exposure: n as f64, ci_halfwidth: Z95 * var.max(0.0).sqrt() }
    }

    /// Ratio estimator `Σ count_i / Σ exposure_i` with its delta-method CI.
    fn ratio(counts: &[u64], exposures: &[f64]) -> Self {
        let n = counts.len() as f64;
        let total: u64 = counts.iter().sum();
        let length: f64 = exposures.iter().sum();
        let value = total as f64 / length;
        let ss: f64 = counts
            .iter()
            .zip(exposures)
            .map(|(&c, &l)| (c as f64 - value * l).powi(2))
            .sum();
        let mean_len = length / n;
        let var = ss / (n - 1.0) / (n * mean_len * mean_len);
        SimEstimate { value, count: total, exposure: length, ci_halfwidth: Z95 * var.sqrt() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EstimateOptions {
    /// Keep every crossing for [`write_events_csv`].
    pub keep_events: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub realization: u64,
    pub crossing: Crossing,
}

/// Aggregated Monte Carlo results.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub realizations: usize,
    /// Probability of association per tier.
    pub association: Vec<SimEstimate>,
    /// Horizontal serving distances of the center drops, meters, per tier.
    pub serving_distance_samples: Vec<Vec<f64>>,
    /// Directed event counts `counts[from][to]` summed over realizations.
    pub counts: Vec<Vec<u64>>,
    /// Total trajectory length, meters.
    pub exposure: f64,
    /// Directed handovers per meter, `None` without exposure.
    hol: Option<Vec<Vec<SimEstimate>>>,
    hol_total: Option<SimEstimate>,
    pub events: Vec<EventRecord>,
}

impl SimReport {
    /// Directed type `k → j` handovers per meter.
    pub fn hol(&self, k: usize, j: usize) -> Result<SimEstimate, SimError> {
        self.hol.as_ref().map(|h| h[k][j]).ok_or(SimError::InsufficientExposure)
    }

    /// All handovers per meter.
    pub fn hol_total(&self) -> Result<SimEstimate, SimError> {
        self.hol_total.ok_or(SimError::InsufficientExposure)
    }

    /// Total number of logged events.
    pub fn total_events(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

struct Outcome {
    tier: usize,
    distance: f64,
    counts: Vec<Vec<u64>>,
    exposure: f64,
    events: Vec<Crossing>,
}

fn run_realization(config: &ScenarioConfig, spec: &TrajectorySpec, index: u64, keep: bool) -> Result<Outcome, SimError> {
    let dep = sample_deployment(config, index);
    let bs = dep.strongest_bs([0.0, 0.0])?;
    let p = dep.position(bs);
    let distance = p[0].hypot(p[1]);
    let tiers = config.tiers.len();
    if spec.length == 0.0 {
        return Ok(Outcome { tier: bs.tier, distance, counts: vec![vec![0; tiers]; tiers], exposure: 0.0, events: Vec::new() });
    }
    let traj = sample_trajectory(spec, &mut stream_rng(config.seed, index, Stream::Trajectory));
    let log = walk_and_log(&dep, &traj, spec.step)?;
    Ok(Outcome {
        tier: bs.tier,
        distance,
        counts: log.counts(tiers),
        exposure: log.exposure,
        events: if keep { log.events } else { Vec::new() },
    })
}

#[cfg(feature = "parallel")]
fn run_all(config: &ScenarioConfig, spec: &TrajectorySpec, n: usize, keep: bool) -> Vec<Result<Outcome, SimError>> {
    use rayon::prelude::*;
    (0..n as u64).into_par_iter().map(|i| run_realization(config, spec, i, keep)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_all(config: &ScenarioConfig, spec: &TrajectorySpec, n: usize, keep: bool) -> Vec<Result<Outcome, SimError>> {
    (0..n as u64).map(|i| run_realization(config, spec, i, keep)).collect()
}

/// Runs `n_realizations` independent realizations of `config`.
///
/// Each realization draws a fresh deployment, records the serving BS of a
/// user at the window center and walks one trajectory through the core.
pub fn estimate(config: &ScenarioConfig, n_realizations: usize) -> Result<SimReport, SimError> {
    estimate_with(config, n_realizations, EstimateOptions::default())
}

pub fn estimate_with(config: &ScenarioConfig, n_realizations: usize, options: EstimateOptions) -> Result<SimReport, SimError> {
    config.validate()?;
    if n_realizations < 2 {
        return Err(SimError::TooFewRealizations(n_realizations));
    }
    let spec = TrajectorySpec {
        kind: config.sim.trajectory,
        length: config.sim.trajectory_length,
        step: config.sim.step,
        guard: guard_band(config),
    };
    spec.validate(window_side(config))?;

    let tiers = config.tiers.len();
    let mut served = vec![0u64; tiers];
    let mut samples = vec![Vec::new(); tiers];
    let mut counts = vec![vec![0u64; tiers]; tiers];
    let mut per_real: Vec<Vec<Vec<u64>>> = vec![vec![Vec::with_capacity(n_realizations); tiers]; tiers];
    let mut per_real_total = Vec::with_capacity(n_realizations);
    let mut exposures = Vec::with_capacity(n_realizations);
    let mut events = Vec::new();

    // Aggregation in realization order keeps results independent of threads.
    for (i, outcome) in run_all(config, &spec, n_realizations, options.keep_events).into_iter().enumerate() {
        let o = outcome?;
        served[o.tier] += 1;
        samples[o.tier].push(o.distance);
        let mut total = 0;
        for k in 0..tiers {
            for j in 0..tiers {
                counts[k][j] += o.counts[k][j];
                per_real[k][j].push(o.counts[k][j]);
                total += o.counts[k][j];
            }
        }
        per_real_total.push(total);
        exposures.push(o.exposure);
        events.extend(o.events.into_iter().map(|crossing| EventRecord { realization: i as u64, crossing }));
    }

    let exposure: f64 = exposures.iter().sum();
    let (hol, hol_total) = if exposure > 0.0 {
        let hol = per_real
            .iter()
            .map(|row| row.iter().map(|c| SimEstimate::ratio(c, &exposures)).collect())
            .collect();
        (Some(hol), Some(SimEstimate::ratio(&per_real_total, &exposures)))
    } else {
        (None, None)
    };
    Ok(SimReport {
        realizations: n_realizations,
        association: served.iter().map(|&h| SimEstimate::proportion(h, n_realizations)).collect(),
        serving_distance_samples: samples,
        counts,
        exposure,
        hol,
        hol_total,
        events,
    })
}

/// Writes the raw crossings as CSV.
pub fn write_events_csv<W: Write>(events: &[EventRecord], out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["realization", "s_position_m", "from_tier", "from_id", "to_tier", "to_id"])?;
    for e in events {
        let c = &e.crossing;
        w.write_record([
            e.realization.to_string(),
            format!("{:.4}", c.s),
            c.from.tier.to_string(),
            c.from.id.to_string(),
            c.to.tier.to_string(),
            c.to.id.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
