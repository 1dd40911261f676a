use crate::model::PairGeometry;
use std::f64::consts::PI;

/// Probability that tier `k` serves the typical user, split by regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssociationSplit {
    /// Near regime: serving horizontal distance below the threshold, where no
    /// BS of the other tier can compete.
    pub a_k1: f64,
    /// Far regime.
    pub a_k2: f64,
    pub a_k: f64,
}

/// Closed-form association split for tier `geom.k`.
///
/// Conditioning on the serving horizontal distance `r`, the other tier must
/// leave a disc of squared radius `β_jk(r² + h_uk²) − h_uj²` empty. Below the
/// threshold `L_k` that radius is imaginary and the void probability is one;
/// above it the Gaussian integral closes in terms of `λ_kj`.
pub fn association_split(geom: &PairGeometry) -> AssociationSplit {
    if geom.lambda_k == 0.0 {
        return AssociationSplit { a_k1: 0.0, a_k2: 0.0, a_k: 0.0 };
    }
    let near_mass = (-PI * geom.lambda_k * geom.l_k * geom.l_k).exp();
    let a_k1 = -(-PI * geom.lambda_k * geom.l_k * geom.l_k).exp_m1();
    // Exponent of the far branch evaluated at its lower limit L_k.
    let void_at_l = geom.exclusion_radius_sq(geom.l_k).max(0.0);
    let a_k2 = geom.lambda_kj * near_mass * (-PI * geom.lambda_j * void_at_l).exp();
    AssociationSplit { a_k1, a_k2, a_k: a_k1 + a_k2 }
}

/// Association splits for both tiers of a pair: `[tier k, tier j]`.
pub fn association_probabilities(geom: &PairGeometry) -> [AssociationSplit; 2] {
    [association_split(geom), association_split(&geom.swapped())]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{pair_geometry, ScenarioConfig};
    use crate::quadrature::{integrate_finite, integrate_semi_infinite, QuadratureSettings};

    /// Direct evaluation of `E_{Z_k}[P(Z_j > (β_jk)^{1/2} Z_k)]` over the 3D
    /// nearest-distance law `F_Z(x) = 1 − exp(−πλ(x² − h²))`, x > h.
    fn association_by_integration(g: &PairGeometry) -> f64 {
        let s = QuadratureSettings::default().with_rel_tol(1e-11).with_max_subdivisions(400);
        let pdf = |z: f64| 2.0 * PI * g.lambda_k * z * (-PI * g.lambda_k * (z * z - g.h_uk * g.h_uk)).exp();
        let p_win = |z: f64| {
            let zj_min_sq = g.beta_jk * z * z;
            if zj_min_sq <= g.h_uj * g.h_uj {
                1.0
            } else {
                (-PI * g.lambda_j * (zj_min_sq - g.h_uj * g.h_uj)).exp()
            }
        };
        // Split at the 3D distance where the competitor disc opens.
        let z_split = (g.beta_kj * g.h_uj * g.h_uj).sqrt().max(g.h_uk);
        let near = integrate_finite(|z| pdf(z) * p_win(z), g.h_uk, z_split, &s).unwrap().value;
        let c = PI * (g.lambda_k + g.lambda_j * g.beta_jk);
        let far = integrate_semi_infinite(|z| pdf(z) * p_win(z), z_split, c, &s).unwrap().value;
        near + far
    }

    #[test]
    fn flat_heights_reduce_to_lambda_ratio() {
        let mut cfg = ScenarioConfig::baseline();
        for t in &mut cfg.tiers {
            t.height = 10.0;
        }
        cfg.user_height = 10.0;
        let [m, s] = association_probabilities(&pair_geometry(&cfg, 0, 1));
        let beta_sm = 10f64.powf(-1.1);
        let expected = 3.0 / (3.0 + 10.0 * beta_sm);
        assert!((m.a_k - expected).abs() < 1e-12);
        assert!((expected - 0.790_653_790_187_447_5).abs() < 1e-12);
        assert!((m.a_k + s.a_k - 1.0).abs() < 1e-12);
        assert_eq!(m.a_k1, 0.0);
    }

    #[test]
    fn closed_form_matches_appendix_integral() {
        let base = ScenarioConfig::baseline();
        for hu in [0.0, 1.5, 20.0, 25.0, 32.5, 40.0, 60.0] {
            let cfg = base.clone().with_user_height(hu);
            let g = pair_geometry(&cfg, 0, 1);
            let [m, s] = association_probabilities(&g);
            let m_int = association_by_integration(&g);
            let s_int = association_by_integration(&g.swapped());
            assert!((m.a_k - m_int).abs() < 1e-9, "h_u={hu}: {} vs {}", m.a_k, m_int);
            assert!((s.a_k - s_int).abs() < 1e-9, "h_u={hu}: {} vs {}", s.a_k, s_int);
        }
    }

    #[test]
    fn vanishing_small_tier() {
        let mut cfg = ScenarioConfig::baseline();
        cfg.tiers[1].lambda = 0.0;
        let [m, s] = association_probabilities(&pair_geometry(&cfg, 0, 1));
        assert!((m.a_k - 1.0).abs() < 1e-15);
        assert_eq!(s.a_k, 0.0);
    }

    #[test]
    fn only_one_tier_has_a_near_regime() {
        let base = ScenarioConfig::baseline();
        for hu in [0.0, 10.0, 30.0, 50.0] {
            let g = pair_geometry(&base.clone().with_user_height(hu), 0, 1);
            assert!(g.l_k == 0.0 || g.l_j == 0.0);
        }
    }
}
