use super::deployment::{guard_band, stream_rng, Deployment, Stream, TierLayer};
use super::SimError;
use crate::model::{BsRef, ScenarioConfig, TrajectoryKind};
use rand::Rng;
use std::f64::consts::PI;

/// Bisection stops once the bracket is narrower than this, meters.
pub const CROSSING_RESOLUTION: f64 = 1e-3;

/// Steps handled per candidate set.
const STEPS_PER_CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySpec {
    pub kind: TrajectoryKind,
    /// Meters.
    pub length: f64,
    /// Meters.
    pub step: f64,
    /// Guard band on each side of the core, meters.
    pub guard: f64,
}

impl TrajectorySpec {
    pub fn validate(&self, window_side: f64) -> Result<(), SimError> {
        if self.step.is_nan() || self.step <= 0.0 {
            return Err(SimError::BadTrajectory("step must be positive".into()));
        }
        if self.length + 2.0 * self.guard > window_side * (1.0 + 1e-12) {
            return Err(SimError::BadTrajectory(format!(
                "length {} m plus guard bands {} m exceed window side {} m",
                self.length,
                2.0 * self.guard,
                window_side
            )));
        }
        Ok(())
    }
}

/// Straight piece of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leg {
    pub start: [f64; 2],
    /// Unit direction.
    pub dir: [f64; 2],
    pub length: f64,
}

impl Leg {
    fn at(&self, s: f64) -> [f64; 2] {
        [self.start[0] + self.dir[0] * s, self.start[1] + self.dir[1] * s]
    }
}

/// Piecewise-linear path parameterized by arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub legs: Vec<Leg>,
}

impl Trajectory {
    pub fn straight(start: [f64; 2], end: [f64; 2]) -> Self {
        let (dx, dy) = (end[0] - start[0], end[1] - start[1]);
        let length = dx.hypot(dy);
        if length == 0.0 {
            return Trajectory { legs: Vec::new() };
        }
        Trajectory { legs: vec![Leg { start, dir: [dx / length, dy / length], length }] }
    }

    pub fn length(&self) -> f64 {
        self.legs.iter().map(|l| l.length).sum()
    }

    /// Point at arc length `s` (clamped to the path).
    pub fn point_at(&self, mut s: f64) -> Option<[f64; 2]> {
        let last = self.legs.last()?;
        for leg in &self.legs {
            if s <= leg.length {
                return Some(leg.at(s.max(0.0)));
            }
            s -= leg.length;
        }
        Some(last.at(last.length))
    }
}

/// Trajectory inside the core square `[-L/2, L/2]²` of the window.
///
/// Straight: a centered segment of length L with uniform orientation.
/// Random waypoint: legs between uniform waypoints in the core, truncated
/// at total length L.
pub fn sample_trajectory<R: Rng>(spec: &TrajectorySpec, rng: &mut R) -> Trajectory {
    let len = spec.length;
    if len <= 0.0 {
        return Trajectory { legs: Vec::new() };
    }
    let half = 0.5 * len;
    match spec.kind {
        TrajectoryKind::Straight => {
            let phi = rng.random_range(0.0..2.0 * PI);
            let (sin, cos) = phi.sin_cos();
            Trajectory::straight([-half * cos, -half * sin], [half * cos, half * sin])
        }
        TrajectoryKind::RandomWaypoint => {
            let mut legs = Vec::new();
            let mut here = [rng.random_range(-half..half), rng.random_range(-half..half)];
            let mut remaining = len;
            while remaining > 0.0 {
                let next = [rng.random_range(-half..half), rng.random_range(-half..half)];
                let (dx, dy) = (next[0] - here[0], next[1] - here[1]);
                let d = dx.hypot(dy);
                if d == 0.0 {
                    continue;
                }
                let length = d.min(remaining);
                legs.push(Leg { start: here, dir: [dx / d, dy / d], length });
                remaining -= length;
                here = next;
            }
            Trajectory { legs }
        }
    }
}

/// Trajectory that [`crate::sim::estimate`] walks in realization `realization`.
pub fn realization_trajectory(config: &ScenarioConfig, realization: u64) -> Trajectory {
    let spec = TrajectorySpec {
        kind: config.sim.trajectory,
        length: config.sim.trajectory_length,
        step: config.sim.step,
        guard: guard_band(config),
    };
    sample_trajectory(&spec, &mut stream_rng(config.seed, realization, Stream::Trajectory))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Arc-length position of the boundary crossing, meters.
    pub s: f64,
    pub from: BsRef,
    pub to: BsRef,
}

impl Crossing {
    pub fn is_intra(&self) -> bool {
        self.from.tier == self.to.tier
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingLog {
    pub events: Vec<Crossing>,
    /// Trajectory length, meters.
    pub exposure: f64,
}

impl CrossingLog {
    /// Directed counts `n[from_tier][to_tier]`.
    pub fn counts(&self, tiers: usize) -> Vec<Vec<u64>> {
        let mut n = vec![vec![0u64; tiers]; tiers];
        for e in &self.events {
            n[e.from.tier][e.to.tier] += 1;
        }
        n
    }
}

/// BSs that can serve somewhere on a short segment, grouped per tier and
/// sorted by id.
struct Candidates {
    tiers: Vec<Vec<(usize, [f64; 2])>>,
}

impl Candidates {
    /// Every BS that could beat the best metric guaranteed somewhere on the
    /// segment `[a, b]`.
    ///
    /// With `c` the midpoint and `h` the half-length, the serving metric
    /// anywhere on the segment is at most
    /// `U = min_t ((d_t(c) + h)² + Δh_t²) / w_t`; a tier-`t` BS can only
    /// reach `U` if it lies within `h + sqrt(U w_t − Δh_t²)` of `c`.
    fn for_segment(dep: &Deployment, a: [f64; 2], b: [f64; 2], buf: &mut Vec<(usize, [f64; 2])>) -> Self {
        let c = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let h = 0.5 * (b[0] - a[0]).hypot(b[1] - a[1]);
        let mut bound = f64::INFINITY;
        for layer in &dep.tiers {
            if let Some((_, d2)) = layer.grid.nearest(&layer.positions, c) {
                bound = bound.min(layer.metric((d2.sqrt() + h).powi(2)));
            }
        }
        let tiers = dep
            .tiers
            .iter()
            .map(|layer| Self::collect(layer, c, h, bound, buf))
            .collect();
        Candidates { tiers }
    }

    fn collect(layer: &TierLayer, c: [f64; 2], h: f64, bound: f64, buf: &mut Vec<(usize, [f64; 2])>) -> Vec<(usize, [f64; 2])> {
        let reach_sq = bound / layer.inv_weight - layer.dh2;
        if reach_sq.is_nan() || reach_sq < 0.0 {
            return Vec::new();
        }
        // Slack absorbs rounding in the bound itself.
        let radius = (h + reach_sq.sqrt()) * (1.0 + 1e-9) + 1e-6;
        buf.clear();
        layer.grid.for_each_within(&layer.positions, c, radius, |i, _| buf.push((i, layer.positions[i])));
        buf.sort_unstable_by_key(|(i, _)| *i);
        buf.clone()
    }

    /// Same decision rule as [`Deployment::strongest_bs`] restricted to the
    /// candidate set.
    #[inline]
    fn serving(&self, dep: &Deployment, p: [f64; 2]) -> Option<BsRef> {
        let mut best: Option<(f64, BsRef)> = None;
        for (tier, (cands, layer)) in self.tiers.iter().zip(&dep.tiers).enumerate() {
            let mut nearest: Option<(usize, f64)> = None;
            for &(id, q) in cands {
                let d2 = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
                if nearest.is_none_or(|(_, bd)| d2 < bd) {
                    nearest = Some((id, d2));
                }
            }
            if let Some((id, d2)) = nearest {
                let m = layer.metric(d2);
                let cand = BsRef { tier, id };
                if best.is_none_or(|(bm, b)| crate::model::beats(m, cand, bm, b)) {
                    best = Some((m, cand));
                }
            }
        }
        best.map(|(_, b)| b)
    }
}

/// Walks `traj` in steps of `step` meters, recording every change of the
/// serving BS. Each change is located by bisection to [`CROSSING_RESOLUTION`].
///
/// Two crossings inside one step collapse into a single event between the
/// servers at the step ends.
pub fn walk_and_log(dep: &Deployment, traj: &Trajectory, step: f64) -> Result<CrossingLog, SimError> {
    if step.is_nan() || step <= 0.0 {
        return Err(SimError::BadTrajectory("step must be positive".into()));
    }
    let mut events = Vec::new();
    let exposure = traj.length();
    let Some(first) = traj.legs.first() else {
        return Ok(CrossingLog { events, exposure });
    };
    let mut current = dep.strongest_bs(first.start)?;
    let mut offset = 0.0;
    let mut buf = Vec::new();

    for leg in &traj.legs {
        let n = (leg.length / step).ceil().max(1.0) as usize;
        let s_of = |i: usize| (i as f64 * step).min(leg.length);
        let mut i0 = 1;
        while i0 <= n {
            let i1 = (i0 + STEPS_PER_CHUNK - 1).min(n);
            let cands = Candidates::for_segment(dep, leg.at(s_of(i0 - 1)), leg.at(s_of(i1)), &mut buf);
            let serve = |s: f64| cands.serving(dep, leg.at(s)).ok_or(SimError::EmptyDeployment);
            for i in i0..=i1 {
                let s = s_of(i);
                let next = serve(s)?;
                if next != current {
                    let (mut lo, mut hi) = (s_of(i - 1), s);
                    while hi - lo > CROSSING_RESOLUTION {
                        let mid = 0.5 * (lo + hi);
                        if serve(mid)? == current {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    events.push(Crossing { s: offset + 0.5 * (lo + hi), from: current, to: next });
                    current = next;
                }
            }
            i0 = i1 + 1;
        }
        offset += leg.length;
    }
    Ok(CrossingLog { events, exposure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::deployment::sample_deployment;
    use crate::TierParams;

    fn flat_single() -> ScenarioConfig {
        let mut c = ScenarioConfig::baseline();
        c.tiers = vec![TierParams::from_user_units("a", 10.0, 30.0, 0.0, 0.0).unwrap()];
        c.user_height = 0.0;
        c
    }

    #[test]
    fn single_bs_no_events() {
        let cfg = flat_single();
        let d = Deployment::from_positions(&cfg, 2000.0, vec![vec![[3.0, 4.0]]]);
        let log = walk_and_log(&d, &Trajectory::straight([-500.0, 0.0], [500.0, 0.0]), 0.05).unwrap();
        assert!(log.events.is_empty());
        assert_eq!(log.exposure, 1000.0);
    }

    #[test]
    fn bisector_crossing_located() {
        let cfg = flat_single();
        let d = Deployment::from_positions(&cfg, 2000.0, vec![vec![[-50.0, 0.0], [50.0, 0.0]]]);
        let log = walk_and_log(&d, &Trajectory::straight([-300.0, 0.0], [300.0, 0.0]), 0.05).unwrap();
        assert_eq!(log.events.len(), 1);
        let e = log.events[0];
        assert!((e.s - 300.0).abs() <= 1e-3, "{}", e.s);
        assert_eq!((e.from.id, e.to.id), (0, 1));
    }

    #[test]
    fn zero_length_trajectory() {
        let cfg = flat_single();
        let d = Deployment::from_positions(&cfg, 2000.0, vec![vec![[0.0, 0.0]]]);
        let log = walk_and_log(&d, &Trajectory { legs: vec![] }, 0.05).unwrap();
        assert!(log.events.is_empty());
        assert_eq!(log.exposure, 0.0);
    }

    #[test]
    fn events_strictly_increasing_and_change_server() {
        let mut cfg = ScenarioConfig::baseline().with_user_height(10.0);
        cfg.sim.trajectory_length = 3000.0;
        let d = sample_deployment(&cfg, 1);
        let spec = TrajectorySpec { kind: TrajectoryKind::RandomWaypoint, length: 3000.0, step: 0.05, guard: 1629.0 };
        let traj = sample_trajectory(&spec, &mut stream_rng(1, 1, Stream::Trajectory));
        assert!((traj.length() - 3000.0).abs() < 1e-9);
        let log = walk_and_log(&d, &traj, 0.05).unwrap();
        assert!(!log.events.is_empty());
        for w in log.events.windows(2) {
            assert!(w[0].s < w[1].s);
        }
        for e in &log.events {
            assert_ne!(e.from, e.to);
        }
        // The serving sequence is consistent with brute force at event ends.
        for e in &log.events {
            let p = traj.point_at(e.s + 0.01).unwrap();
            assert_eq!(d.strongest_bs_brute_force(p).unwrap(), e.to);
        }
    }

    #[test]
    fn candidate_scan_agrees_with_full_search() {
        let cfg = ScenarioConfig::baseline().with_user_height(30.0);
        let d = sample_deployment(&cfg, 5);
        let traj = Trajectory::straight([-2000.0, -700.0], [2500.0, 900.0]);
        let step = 0.5;
        let log = walk_and_log(&d, &traj, step).unwrap();
        // Replay with the exhaustive rule at every step.
        let n = (traj.length() / step).ceil() as usize;
        let mut cur = d.strongest_bs_brute_force(traj.point_at(0.0).unwrap()).unwrap();
        let mut changes = 0;
        for i in 1..=n {
            let p = traj.point_at((i as f64 * step).min(traj.length())).unwrap();
            let s = d.strongest_bs_brute_force(p).unwrap();
            if s != cur {
                changes += 1;
                cur = s;
            }
        }
        assert_eq!(log.events.len(), changes);
    }

    #[test]
    fn open_path_inter_tier_counts_differ_by_at_most_one() {
        let mut cfg = ScenarioConfig::baseline().with_user_height(1.5);
        cfg.sim.trajectory_length = 10_000.0;
        for r in 0..5 {
            let d = sample_deployment(&cfg, r);
            let spec = TrajectorySpec { kind: TrajectoryKind::Straight, length: 10_000.0, step: 0.05, guard: 1629.0 };
            let traj = sample_trajectory(&spec, &mut stream_rng(cfg.seed, r, Stream::Trajectory));
            let n = walk_and_log(&d, &traj, 0.05).unwrap().counts(2);
            assert!(n[0][1].abs_diff(n[1][0]) <= 1, "{n:?}");
        }
    }

    #[test]
    fn window_check() {
        let spec = TrajectorySpec { kind: TrajectoryKind::Straight, length: 1000.0, step: 0.05, guard: 100.0 };
        assert!(spec.validate(1200.0).is_ok());
        assert!(spec.validate(1100.0).is_err());
    }
}
