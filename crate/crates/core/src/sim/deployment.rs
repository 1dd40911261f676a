use super::grid::SpatialGrid;
use super::SimError;
use crate::model::{beats, BsRef, ScenarioConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use std::f64::consts::PI;

/// Independent RNG streams per realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stream {
    Deployment = 0,
    Trajectory = 1,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one realization's stream, independent of execution order.
pub(crate) fn stream_rng(master: u64, realization: u64, stream: Stream) -> ChaCha8Rng {
    let seed = splitmix64(splitmix64(master ^ splitmix64(realization)) ^ stream as u64);
    ChaCha8Rng::seed_from_u64(seed)
}

/// Guard band between the window edge and the trajectory core:
/// `5/sqrt(π λ_min)` unless overridden.
pub fn guard_band(config: &ScenarioConfig) -> f64 {
    config
        .sim
        .guard
        .unwrap_or_else(|| 5.0 / (PI * config.min_positive_lambda()).sqrt())
}

/// Window side `W = trajectory length + 2g`.
pub fn window_side(config: &ScenarioConfig) -> f64 {
    config.sim.trajectory_length + 2.0 * guard_band(config)
}

/// BS positions of one tier.
#[derive(Debug, Clone)]
pub struct TierLayer {
    pub positions: Vec<[f64; 2]>,
    pub height: f64,
    /// `1 / (B·P)^(2/η)`.
    pub(crate) inv_weight: f64,
    /// Squared user–antenna height difference.
    pub(crate) dh2: f64,
    pub(crate) grid: SpatialGrid,
}

impl TierLayer {
    #[inline]
    pub(crate) fn metric(&self, d2: f64) -> f64 {
        (d2 + self.dh2) * self.inv_weight
    }
}

/// One PPP realization in the centered square window.
#[derive(Debug, Clone)]
pub struct Deployment {
    pub window_side: f64,
    pub user_height: f64,
    pub realization: u64,
    pub tiers: Vec<TierLayer>,
}

impl Deployment {
    /// Builds a deployment from explicit positions, one list per tier of `config`.
    pub fn from_positions(config: &ScenarioConfig, window_side: f64, positions: Vec<Vec<[f64; 2]>>) -> Self {
        assert_eq!(positions.len(), config.tiers.len(), "one position list per tier");
        let half = 0.5 * window_side;
        let tiers = config
            .tiers
            .iter()
            .zip(positions)
            .map(|(t, pos)| {
                let cell = if t.lambda > 0.0 { 1.0 / t.lambda.sqrt() } else { window_side };
                TierLayer {
                    grid: SpatialGrid::build(&pos, half, cell),
                    positions: pos,
                    height: t.height,
                    inv_weight: 1.0 / t.association_weight(config.eta),
                    dh2: (config.user_height - t.height).powi(2),
                }
            })
            .collect();
        Deployment { window_side, user_height: config.user_height, realization: 0, tiers }
    }

    pub fn bs_count(&self, tier: usize) -> usize {
        self.tiers[tier].positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiers.iter().all(|t| t.positions.is_empty())
    }

    pub fn position(&self, bs: BsRef) -> [f64; 2] {
        self.tiers[bs.tier].positions[bs.id]
    }

    /// Serving BS for a user at horizontal position `pos` (at the
    /// deployment's user height): per-tier nearest neighbors, then the best
    /// biased RSS across tiers.
    pub fn strongest_bs(&self, pos: [f64; 2]) -> Result<BsRef, SimError> {
        let mut best: Option<(f64, BsRef)> = None;
        for (tier, layer) in self.tiers.iter().enumerate() {
            if let Some((id, d2)) = layer.grid.nearest(&layer.positions, pos) {
                let m = layer.metric(d2);
                let cand = BsRef { tier, id };
                if best.is_none_or(|(bm, b)| beats(m, cand, bm, b)) {
                    best = Some((m, cand));
                }
            }
        }
        best.map(|(_, b)| b).ok_or(SimError::EmptyDeployment)
    }

    /// Exhaustive scan; reference for [`Deployment::strongest_bs`].
    pub fn strongest_bs_brute_force(&self, pos: [f64; 2]) -> Result<BsRef, SimError> {
        let mut best: Option<(f64, BsRef)> = None;
        for (tier, layer) in self.tiers.iter().enumerate() {
            for (id, p) in layer.positions.iter().enumerate() {
                let d2 = (p[0] - pos[0]).powi(2) + (p[1] - pos[1]).powi(2);
                let m = layer.metric(d2);
                let cand = BsRef { tier, id };
                if best.is_none_or(|(bm, b)| beats(m, cand, bm, b)) {
                    best = Some((m, cand));
                }
            }
        }
        best.map(|(_, b)| b).ok_or(SimError::EmptyDeployment)
    }
}

/// Draws the PPP realization `realization` of `config`.
pub fn sample_deployment(config: &ScenarioConfig, realization: u64) -> Deployment {
    let w = window_side(config);
    let half = 0.5 * w;
    let mut rng = stream_rng(config.seed, realization, Stream::Deployment);
    let positions = config
        .tiers
        .iter()
        .map(|t| {
            let mean = t.lambda * w * w;
            let n = if mean > 0.0 {
                Poisson::new(mean).expect("finite positive mean").sample(&mut rng) as usize
            } else {
                0
            };
            (0..n)
                .map(|_| [rng.random_range(-half..half), rng.random_range(-half..half)])
                .collect()
        })
        .collect();
    let mut d = Deployment::from_positions(config, w, positions);
    d.realization = realization;
    d
}
