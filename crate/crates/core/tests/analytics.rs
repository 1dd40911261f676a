//! Analytical engine against an independent equal-height implementation,
//! plus structural properties of the pair geometry.

use proptest::prelude::*;
use std::f64::consts::PI;
use udn_handover::model::pair_geometry;
use udn_handover::{ScenarioConfig, TierParams, TwoTierModel};

/// `E(m)` by the arithmetic–geometric mean.
fn elliptic_e(m: f64) -> f64 {
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    let (mut sum, mut pow) = (0.5 * m, 0.5);
    for _ in 0..40 {
        if a == b {
            break;
        }
        let c = 0.5 * (a - b);
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
        pow *= 2.0;
        sum += pow * c * c;
    }
    PI / (2.0 * a) * (1.0 - sum)
}

struct Flat {
    lambda: [f64; 2],
    beta_ms: f64,
}

impl Flat {
    fn cap(&self, k: usize) -> f64 {
        let b = if k == 0 { 1.0 / self.beta_ms } else { self.beta_ms };
        self.lambda[k] + self.lambda[1 - k] * b
    }

    fn intra(&self, k: usize) -> f64 {
        2.0 * self.lambda[k].powi(2) / self.cap(k).powf(1.5)
    }

    fn inter(&self) -> f64 {
        let b = self.beta_ms;
        let s = b.sqrt();
        let ring = 2.0 * (1.0 + s) * elliptic_e(4.0 * s / (1.0 + s).powi(2));
        2.0 * self.lambda[0] * self.lambda[1] * ring / (2.0 * b * self.cap(0).powf(1.5))
    }
}

fn flat_config(lm: f64, ls: f64, pm: f64, ps: f64, bias: f64, eta: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::baseline();
    cfg.tiers = vec![
        TierParams::from_user_units("m", lm, pm, 0.0, 0.0).unwrap(),
        TierParams::from_user_units("s", ls, ps, bias, 0.0).unwrap(),
    ];
    cfg.user_height = 0.0;
    cfg.eta = eta;
    cfg
}

#[test]
fn equal_heights_match_independent_closed_forms() {
    let cases = [
        (3.0, 10.0, 46.0, 24.0, 0.0, 4.0),
        (1.0, 100.0, 43.0, 30.0, 6.0, 3.0),
        (10.0, 2.0, 40.0, 33.0, 12.0, 4.5),
        (0.5, 50.0, 49.0, 18.0, 3.0, 2.5),
    ];
    for (lm, ls, pm, ps, bias, eta) in cases {
        let cfg = flat_config(lm, ls, pm, ps, bias, eta);
        let w: Vec<f64> = cfg.tiers.iter().map(|t| t.association_weight(eta)).collect();
        let oracle = Flat { lambda: [cfg.tiers[0].lambda, cfg.tiers[1].lambda], beta_ms: w[0] / w[1] };
        let model = TwoTierModel::from_config(&cfg).unwrap();
        let r = model.evaluate(cfg.velocity).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        for k in 0..2 {
            assert!(rel(r.association[k].a_k, oracle.lambda[k] / oracle.cap(k)) < 1e-8);
            assert!(rel(r.intra[k].length_intensity, oracle.intra(k)) < 1e-8, "intra {k}: {:?}", r.intra[k]);
            assert!(rel(r.report.hol[k][k], 2.0 / PI * oracle.intra(k)) < 1e-8);
        }
        assert!(rel(r.inter.length_intensity, oracle.inter()) < 1e-8, "inter: {:?} vs {}", r.inter, oracle.inter());
        assert!(rel(r.report.hol[0][1], oracle.inter() / PI) < 1e-8);
        assert!(rel(r.report.hol[1][0], oracle.inter() / PI) < 1e-8);
    }
}

fn arb_config() -> impl Strategy<Value = ScenarioConfig> {
    (
        (0.1f64..50.0, 0.1f64..300.0, 30.0f64..50.0, 10.0f64..35.0),
        (0.0f64..15.0, 0.0f64..80.0, 0.0f64..80.0, 0.0f64..80.0, 2.1f64..6.0),
    )
        .prop_map(|((lm, ls, pm, ps), (bias, hm, hs, hu, eta))| {
            let mut cfg = ScenarioConfig::baseline();
            cfg.tiers = vec![
                TierParams::from_user_units("m", lm, pm, 0.0, hm).unwrap(),
                TierParams::from_user_units("s", ls, ps, bias, hs).unwrap(),
            ];
            cfg.user_height = hu;
            cfg.eta = eta;
            cfg
        })
}

proptest! {
    #[test]
    fn bias_ratios_are_reciprocal(cfg in arb_config()) {
        let g = pair_geometry(&cfg, 0, 1);
        prop_assert!((g.beta_kj * g.beta_jk - 1.0).abs() < 1e-12);
        let back = pair_geometry(&cfg, 1, 0);
        prop_assert!((back.beta_kj - g.beta_jk).abs() <= 1e-12 * g.beta_jk);
    }

    #[test]
    fn at_most_one_threshold_is_positive(cfg in arb_config()) {
        let g = pair_geometry(&cfg, 0, 1);
        prop_assert!(!(g.l_k > 0.0 && g.l_j > 0.0), "L = ({}, {})", g.l_k, g.l_j);
    }

    #[test]
    fn associations_sum_to_one(cfg in arb_config()) {
        let [m, s] = TwoTierModel::from_config(&cfg).unwrap().association();
        prop_assert!((m.a_k + s.a_k - 1.0).abs() < 1e-9);
        prop_assert!((m.a_k1 + m.a_k2 - m.a_k).abs() < 1e-12);
    }
}
