//! Reference values computed without the engine under test.
//!
//! Everything here is a closed form or a classical special-function
//! algorithm, written from scratch so the acceptance suite never checks
//! the library against itself.

use std::f64::consts::PI;

/// Complete elliptic integral of the second kind `E(m) = ∫₀^{π/2} sqrt(1 − m sin²φ) dφ`
/// by the arithmetic–geometric mean.
pub fn elliptic_e(m: f64) -> f64 {
    assert!((0.0..=1.0).contains(&m), "parameter m = {m} outside [0, 1]");
    if m == 1.0 {
        return 1.0;
    }
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    let mut c2_sum = 0.5 * m;
    let mut pow = 0.5;
    // Quadratic convergence: 40 rounds are far beyond double precision.
    for _ in 0..40 {
        if a == b {
            break;
        }
        let c = 0.5 * (a - b);
        let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
        pow *= 2.0;
        c2_sum += pow * c * c;
        a = an;
        b = bn;
    }
    PI / (2.0 * a) * (1.0 - c2_sum)
}

/// `∫₀^π sqrt(β + 1 − 2√β cos θ) dθ = 2 (1 + √β) E(4√β / (1 + √β)²)`.
pub fn ring_integral(beta: f64) -> f64 {
    let s = beta.sqrt();
    2.0 * (1.0 + s) * elliptic_e(4.0 * s / (1.0 + s).powi(2))
}

/// Ring kernel for equal heights: `(r/β) ∫₀^π sqrt(β + 1 − 2√β cos θ) dθ`.
pub fn flat_kernel(beta: f64, r: f64) -> f64 {
    r / beta * ring_integral(beta)
}

/// Two tiers with user and antennas at one height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatTwoTier {
    /// BS per m².
    pub lambda: [f64; 2],
    /// Association weights `(B P)^(2/η)`.
    pub weight: [f64; 2],
}

impl FlatTwoTier {
    /// `β_kj = w_k / w_j`.
    pub fn beta(&self, k: usize, j: usize) -> f64 {
        self.weight[k] / self.weight[j]
    }

    /// `Λ_k = λ_k + λ_j β_jk`.
    fn cap(&self, k: usize) -> f64 {
        let j = 1 - k;
        self.lambda[k] + self.lambda[j] * self.beta(j, k)
    }

    pub fn association(&self, k: usize) -> f64 {
        self.lambda[k] / self.cap(k)
    }

    /// Joint density of serving tier `k` at horizontal distance `x`.
    pub fn joint_density(&self, k: usize, x: f64) -> f64 {
        2.0 * PI * self.lambda[k] * x * (-PI * self.cap(k) * x * x).exp()
    }

    /// Intra-tier boundary length per unit area.
    pub fn intra_length(&self, k: usize) -> f64 {
        2.0 * self.lambda[k].powi(2) / self.cap(k).powf(1.5)
    }

    /// Inter-tier boundary length per unit area seen from tier `k`'s side.
    pub fn inter_half(&self, k: usize) -> f64 {
        let (j, b) = (1 - k, self.beta(k, 1 - k));
        self.lambda[k] * self.lambda[j] * ring_integral(b) / (2.0 * b * self.cap(k).powf(1.5))
    }

    pub fn inter_length(&self) -> f64 {
        self.inter_half(0) + self.inter_half(1)
    }

    /// Handovers per meter: intra `(2/π)·μ_kk`, each direction `μ_kj/π`.
    pub fn hol(&self, k: usize, j: usize) -> f64 {
        if k == j {
            2.0 / PI * self.intra_length(k)
        } else {
            self.inter_length() / PI
        }
    }
}

/// Single Poisson–Voronoi tier: boundary length per unit area `2√λ`.
pub fn voronoi_length(lambda: f64) -> f64 {
    2.0 * lambda.sqrt()
}

/// Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic one-sample KS critical value at level `alpha`: `sqrt(−ln(α/2)/2)/√n`.
pub fn ks_critical(alpha: f64, n: usize) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elliptic_known_values() {
        assert!((elliptic_e(0.0) - PI / 2.0).abs() < 1e-15);
        assert!((elliptic_e(0.5) - 1.350_643_881_047_675_5).abs() < 1e-14);
        assert!((elliptic_e(0.9) - 1.104_774_732_704_073_5).abs() < 1e-14);
    }

    #[test]
    fn unit_beta_ring_is_four() {
        assert!((ring_integral(1.0) - 4.0).abs() < 1e-14);
        assert!((flat_kernel(1.0, 2.5) - 10.0).abs() < 1e-14);
    }

    #[test]
    fn ring_integral_matches_midpoint_sum() {
        // 10⁷-point midpoint rule at β = 4.
        assert!((ring_integral(4.0) - 6.682_446_610_277_631).abs() < 1e-11);
    }

    #[test]
    fn ring_integral_inverse_symmetry() {
        for b in [0.01, 0.3, 2.0, 17.0] {
            assert!((ring_integral(1.0 / b) - ring_integral(b) / b.sqrt()).abs() < 1e-13);
        }
    }

    #[test]
    fn flat_sides_agree_and_associations_sum() {
        let f = FlatTwoTier { lambda: [3e-6, 1e-5], weight: [1.0, 10f64.powf(-1.1)] };
        assert!((f.inter_half(0) - f.inter_half(1)).abs() < 1e-15);
        assert!((f.association(0) + f.association(1) - 1.0).abs() < 1e-15);
        assert!((f.association(0) - 0.790_653_790_187_447_5).abs() < 1e-12);
    }

    #[test]
    fn ks_critical_value_at_one_percent() {
        assert!((ks_critical(0.01, 1) - 1.627_624).abs() < 1e-5);
        assert_eq!(ks_statistic(&[0.5], |x| x), 0.5);
    }
}
