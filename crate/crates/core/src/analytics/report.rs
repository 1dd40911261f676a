use super::boundary::BoundaryIntensity;
use std::f64::consts::PI;

/// Directed handover rates of a two-tier network.
///
/// `hol[k][j]` is the expected number of k→j handovers per meter of
/// trajectory; `rate[k][j]` the same per second at the given velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandoverReport {
    pub hol: [[f64; 2]; 2],
    pub rate: [[f64; 2]; 2],
    /// m/s.
    pub velocity: f64,
}

impl HandoverReport {
    pub fn hol_intra_total(&self) -> f64 {
        self.hol[0][0] + self.hol[1][1]
    }

    pub fn hol_inter_total(&self) -> f64 {
        self.hol[0][1] + self.hol[1][0]
    }

    pub fn hol_total(&self) -> f64 {
        self.hol_intra_total() + self.hol_inter_total()
    }

    pub fn rate_intra_total(&self) -> f64 {
        self.rate[0][0] + self.rate[1][1]
    }

    pub fn rate_inter_total(&self) -> f64 {
        self.rate[0][1] + self.rate[1][0]
    }

    pub fn rate_total(&self) -> f64 {
        self.rate_intra_total() + self.rate_inter_total()
    }

    /// Handovers per km.
    pub fn hol_per_km(&self, k: usize, j: usize) -> f64 {
        self.hol[k][j] * 1000.0
    }

    /// Handovers per hour.
    pub fn rate_per_hour(&self, k: usize, j: usize) -> f64 {
        self.rate[k][j] * 3600.0
    }
}

/// Handover rates from boundary length intensities.
///
/// A straight isotropic trajectory crosses boundaries of length intensity μ
/// at `(2/π)μ` per unit length; an inter-tier boundary is crossed in each
/// direction equally often, hence `(1/π)μ` per direction.
pub fn handover_report(intra: [&BoundaryIntensity; 2], inter: &BoundaryIntensity, velocity: f64) -> HandoverReport {
    let mut hol = [[0.0; 2]; 2];
    for (k, b) in intra.iter().enumerate() {
        hol[k][k] = 2.0 / PI * b.length_intensity;
    }
    let directed = inter.length_intensity / PI;
    hol[0][1] = directed;
    hol[1][0] = directed;
    let mut rate = [[0.0; 2]; 2];
    for k in 0..2 {
        for j in 0..2 {
            rate[k][j] = hol[k][j] * velocity;
        }
    }
    HandoverReport { hol, rate, velocity }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(pair: (usize, usize), mu: f64) -> BoundaryIntensity {
        BoundaryIntensity { pair, length_intensity: mu, terms: [mu, 0.0] }
    }

    #[test]
    fn rates_scale_with_velocity_and_sum() {
        let mm = b((0, 0), 1e-3);
        let ss = b((1, 1), 2e-3);
        let ms = b((0, 1), 3e-3);
        let r = handover_report([&mm, &ss], &ms, 30.0 / 3.6);
        for k in 0..2 {
            for j in 0..2 {
                assert_eq!(r.rate[k][j], r.hol[k][j] * r.velocity);
            }
        }
        assert_eq!(r.hol[0][1], r.hol[1][0]);
        let sum: f64 = r.hol.iter().flatten().sum();
        assert!((r.hol_total() - sum).abs() < 1e-18);
        assert!((r.hol[0][0] - 2.0e-3 / PI).abs() < 1e-18);
    }

    #[test]
    fn zero_velocity_keeps_hol() {
        let mm = b((0, 0), 1e-3);
        let ss = b((1, 1), 2e-3);
        let ms = b((0, 1), 3e-3);
        let r = handover_report([&mm, &ss], &ms, 0.0);
        assert_eq!(r.rate_total(), 0.0);
        assert!(r.hol_total() > 0.0);
    }
}
