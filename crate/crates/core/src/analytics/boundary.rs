use super::density::ServiceDistanceDensity;
use super::AnalyticsError;
use crate::model::PairGeometry;
use crate::quadrature::{integrate_finite, integrate_semi_infinite, QuadratureSettings};
use std::cell::{Cell, RefCell};
use std::f64::consts::PI;

/// Relative slack under which a negative radicand is treated as rounding noise.
const RADICAND_SLACK: f64 = 1e-9;

/// Ring-region kernel ϑ for a user served by tier `geom.k` at horizontal
/// distance `r`, meters.
///
/// The probability that the user lies on the Δd-extended boundary towards
/// tier `j` is `2 λ_j Δd ϑ + O(Δd²)`. Intra-tier: `4r`. Inter-tier:
/// `(1/β_kj) ∫₀^π sqrt(R(θ)) dθ` with
/// `R(θ) = r²(β_kj+1) + h_uk²β_kj − h_uj²β_kj² − 2β_kj r cosθ ρ` and
/// `ρ² = (r² + h_uk²)/β_kj − h_uj²`. When `ρ²` is negative no tier-`j`
/// BS can tie with the server and ϑ is zero.
pub fn vartheta(geom: &PairGeometry, r: f64, settings: &QuadratureSettings) -> Result<f64, AnalyticsError> {
    if geom.is_intra() {
        return Ok(4.0 * r);
    }
    let b = geom.beta_kj;
    let rho_sq = (r * r + geom.h_uk * geom.h_uk) / b - geom.h_uj * geom.h_uj;
    if rho_sq < 0.0 {
        return Ok(0.0);
    }
    let rho = rho_sq.sqrt();
    let constant = r * r * (b + 1.0) + geom.h_uk * geom.h_uk * b - geom.h_uj * geom.h_uj * b * b;
    let scale = r * r * (b + 1.0) + geom.h_uk * geom.h_uk * b + geom.h_uj * geom.h_uj * b * b + 2.0 * b * r * rho;
    let bad = Cell::new(None);
    let integrand = |theta: f64| {
        let radicand = constant - 2.0 * b * r * theta.cos() * rho;
        if radicand >= 0.0 {
            radicand.sqrt()
        } else {
            if radicand < -RADICAND_SLACK * scale && bad.get().is_none() {
                bad.set(Some((theta, radicand)));
            }
            0.0
        }
    };
    let integral = integrate_finite(integrand, 0.0, PI, settings)?;
    if let Some((theta, value)) = bad.get() {
        return Err(AnalyticsError::InconsistentRadicand { r, theta, value });
    }
    Ok(integral.value / b)
}

/// Length intensity of one boundary type, m⁻¹: the Δd → 0 limit of the
/// Δd-extended area intensity divided by `2Δd`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryIntensity {
    pub pair: (usize, usize),
    pub length_intensity: f64,
    /// Inter-tier: `[k-serving, j-serving]` contributions.
    /// Intra-tier: `[near-regime, far-regime]` contributions.
    pub terms: [f64; 2],
}

impl BoundaryIntensity {
    pub fn is_intra(&self) -> bool {
        self.pair.0 == self.pair.1
    }
}

/// `λ_j ∫_{L_k}^∞ ϑ_kj(x) g_k(x) dx`: the part of the kj boundary
/// intensity seen from users served by tier `k`.
fn serving_side(
    density: &ServiceDistanceDensity,
    outer: &QuadratureSettings,
    inner: &QuadratureSettings,
) -> Result<f64, AnalyticsError> {
    let geom = *density.geometry();
    if geom.lambda_k == 0.0 || geom.lambda_j == 0.0 {
        return Ok(0.0);
    }
    let failure = RefCell::new(None);
    let integrand = |x: f64| match vartheta(&geom, x, inner) {
        Ok(v) => v * density.far_joint(x),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let result = integrate_semi_infinite(integrand, density.threshold, density.far_decay(), outer);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(geom.lambda_j * result?.value)
}

/// Inter-tier boundary intensity from both serving sides.
///
/// `densities` must be `[g_k, g_j]` for the pair `(k, j)`.
pub fn area_intensity_inter(
    densities: [&ServiceDistanceDensity; 2],
    outer: &QuadratureSettings,
    inner: &QuadratureSettings,
) -> Result<BoundaryIntensity, AnalyticsError> {
    let from_k = serving_side(densities[0], outer, inner)?;
    let from_j = serving_side(densities[1], outer, inner)?;
    let geom = densities[0].geometry();
    Ok(BoundaryIntensity {
        pair: (geom.k, geom.j),
        length_intensity: from_k + from_j,
        terms: [from_k, from_j],
    })
}

/// Intra-tier boundary intensity `λ_k ∫ 4x g_k(x) dx`, split at `L_k`.
pub fn area_intensity_intra(
    density: &ServiceDistanceDensity,
    outer: &QuadratureSettings,
) -> Result<BoundaryIntensity, AnalyticsError> {
    let geom = density.geometry();
    let tier = density.tier;
    if geom.lambda_k == 0.0 {
        return Ok(BoundaryIntensity { pair: (tier, tier), length_intensity: 0.0, terms: [0.0, 0.0] });
    }
    let near = if density.threshold > 0.0 {
        integrate_finite(|x| 4.0 * x * density.near_joint(x), 0.0, density.threshold, outer)?.value
    } else {
        0.0
    };
    let far = integrate_semi_infinite(|x| 4.0 * x * density.far_joint(x), density.threshold, density.far_decay(), outer)?.value;
    let near = geom.lambda_k * near;
    let far = geom.lambda_k * far;
    Ok(BoundaryIntensity { pair: (tier, tier), length_intensity: near + far, terms: [near, far] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{pair_geometry, ScenarioConfig};

    fn inner() -> QuadratureSettings {
        QuadratureSettings::default().with_rel_tol(1e-12).with_max_subdivisions(200)
    }

    fn flat_geom(beta: f64) -> PairGeometry {
        PairGeometry {
            k: 0,
            j: 1,
            beta_kj: beta,
            beta_jk: 1.0 / beta,
            lambda_k: 1e-5,
            lambda_j: 1e-5,
            lambda_kj: 0.5,
            h_uk: 0.0,
            h_uj: 0.0,
            l_k: 0.0,
            l_j: 0.0,
        }
    }

    #[test]
    fn intra_kernel_is_four_r() {
        let cfg = ScenarioConfig::baseline();
        let g = pair_geometry(&cfg, 1, 1);
        assert_eq!(vartheta(&g, 2.0, &inner()).unwrap(), 8.0);
    }

    #[test]
    fn unit_beta_inter_kernel_equals_intra() {
        let v = vartheta(&flat_geom(1.0), 5.0, &inner()).unwrap();
        assert!((v - 20.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn below_existence_threshold_is_zero() {
        let cfg = ScenarioConfig::baseline();
        let g = pair_geometry(&cfg, 0, 1);
        assert!(g.l_k > 1.0);
        assert_eq!(vartheta(&g, 0.5 * g.l_k, &inner()).unwrap(), 0.0);
        assert!(vartheta(&g, 1.01 * g.l_k, &inner()).unwrap() > 0.0);
    }

    #[test]
    fn kernel_approaches_ring_limit_at_threshold() {
        // At ρ → 0 the integrand is constant r, so ϑ → π r / β_kj.
        let cfg = ScenarioConfig::baseline();
        let g = pair_geometry(&cfg, 0, 1);
        let r = g.l_k * (1.0 + 1e-12);
        let v = vartheta(&g, r, &inner()).unwrap();
        assert!((v - PI * r / g.beta_kj).abs() < 1e-4 * v);
    }
}
