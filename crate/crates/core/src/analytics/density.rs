use super::association::{association_split, AssociationSplit};
use crate::model::PairGeometry;
use std::f64::consts::PI;

/// Serving horizontal distance law of tier `k`.
///
/// The primary object is the joint density `g_k(x) = f_{X_k}(x)·A_k`: the
/// density of "tier `k` serves from horizontal distance `x`". Conditional
/// densities divide by `A_k` (whole law) or `A_k1`/`A_k2` (single regime).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceDistanceDensity {
    pub tier: usize,
    /// Regime threshold `L_k`, meters.
    pub threshold: f64,
    pub split: AssociationSplit,
    geom: PairGeometry,
}

impl ServiceDistanceDensity {
    pub fn new(geom: &PairGeometry) -> Self {
        ServiceDistanceDensity {
            tier: geom.k,
            threshold: geom.l_k,
            split: association_split(geom),
            geom: *geom,
        }
    }

    pub fn geometry(&self) -> &PairGeometry {
        &self.geom
    }

    /// Gaussian decay rate of the far branch, `π(λ_k + λ_j β_jk)`.
    pub fn far_decay(&self) -> f64 {
        PI * (self.geom.lambda_k + self.geom.lambda_j * self.geom.beta_jk)
    }

    /// Gaussian decay rate of the near branch, `πλ_k`.
    pub fn near_decay(&self) -> f64 {
        PI * self.geom.lambda_k
    }

    /// Joint density restricted to `[0, L_k]`.
    pub fn near_joint(&self, x: f64) -> f64 {
        if x < 0.0 || x > self.threshold {
            return 0.0;
        }
        let l = self.geom.lambda_k;
        2.0 * PI * l * x * (-PI * l * x * x).exp()
    }

    /// Joint density restricted to `[L_k, ∞)`.
    pub fn far_joint(&self, x: f64) -> f64 {
        if x < self.threshold || x < 0.0 {
            return 0.0;
        }
        let g = &self.geom;
        let void = g.exclusion_radius_sq(x).max(0.0);
        2.0 * PI * g.lambda_k * x * (-PI * g.lambda_k * x * x - PI * g.lambda_j * void).exp()
    }

    pub fn joint(&self, x: f64) -> f64 {
        if x < self.threshold {
            self.near_joint(x)
        } else {
            self.far_joint(x)
        }
    }

    pub fn conditional(&self, x: f64) -> f64 {
        if self.split.a_k > 0.0 {
            self.joint(x) / self.split.a_k
        } else {
            0.0
        }
    }

    pub fn near_conditional(&self, x: f64) -> f64 {
        if self.split.a_k1 > 0.0 {
            self.near_joint(x) / self.split.a_k1
        } else {
            0.0
        }
    }

    pub fn far_conditional(&self, x: f64) -> f64 {
        if self.split.a_k2 > 0.0 {
            self.far_joint(x) / self.split.a_k2
        } else {
            0.0
        }
    }

    /// `P[R_k > x, tier k serves]` in closed form.
    pub fn joint_ccdf(&self, x: f64) -> f64 {
        let g = &self.geom;
        if g.lambda_k == 0.0 {
            return 0.0;
        }
        let x = x.max(0.0);
        if x < self.threshold {
            let near_left = (-PI * g.lambda_k * x * x).exp() - (-PI * g.lambda_k * self.threshold * self.threshold).exp();
            near_left + self.split.a_k2
        } else {
            let void = g.exclusion_radius_sq(x).max(0.0);
            g.lambda_kj * (-PI * g.lambda_k * x * x - PI * g.lambda_j * void).exp()
        }
    }

    /// Conditional CDF of the serving horizontal distance given tier `k` serves.
    pub fn conditional_cdf(&self, x: f64) -> f64 {
        if self.split.a_k <= 0.0 {
            return 0.0;
        }
        (1.0 - self.joint_ccdf(x) / self.split.a_k).clamp(0.0, 1.0)
    }
}

/// Serving-distance density of tier `geom.k`.
pub fn service_distance_density(geom: &PairGeometry) -> ServiceDistanceDensity {
    ServiceDistanceDensity::new(geom)
}
