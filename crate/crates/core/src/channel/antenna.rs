//! Sectored antenna patterns and backhaul beam-gain distributions.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-level sectored pattern: main-lobe gain inside the beam, side-lobe gain outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaPattern {
    pub g_max: f64,
    pub g_min: f64,
    /// Full beamwidth in radians.
    pub theta: f64,
}

impl Default for AntennaPattern {
    /// 18 dB / −2 dB with a 20° beam.
    fn default() -> Self {
        Self {
            g_max: 10f64.powf(1.8),
            g_min: 10f64.powf(-0.2),
            theta: 20f64.to_radians(),
        }
    }
}

impl AntennaPattern {
    pub fn validate(&self, field: &'static str) -> Result<()> {
        if !(self.g_min > 0.0 && self.g_max > self.g_min && self.g_max.is_finite()) {
            return Err(Error::invalid(
                field,
                format!("gains need g_max > g_min > 0, got {} and {}", self.g_max, self.g_min),
            ));
        }
        if !(self.theta > 0.0 && self.theta <= 2.0 * PI) {
            return Err(Error::invalid(field, format!("beamwidth must lie in (0, 2π], got {}", self.theta)));
        }
        Ok(())
    }

    /// Probability that a uniformly random boresight offset falls in the main lobe.
    pub fn main_lobe_fraction(&self) -> f64 {
        self.theta / (2.0 * PI)
    }
}

/// Gain at boresight offset `phi`; the main lobe spans `|phi| ≤ θ/2`.
pub fn antenna_gain(phi: f64, pat: &AntennaPattern) -> Result<f64> {
    if !(-PI..PI).contains(&phi) {
        return Err(Error::domain(format!("boresight offset {phi} outside [-π, π)")));
    }
    Ok(if phi.abs() <= pat.theta / 2.0 {
        pat.g_max
    } else {
        pat.g_min
    })
}

/// Four-atom distribution of the product of BS-side and UAV-side gains.
///
/// Atoms are ordered (max·max, max·min, min·max, min·min) with the BS factor first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainDistribution {
    pub atoms: [(f64, f64); 4],
}

impl GainDistribution {
    fn product(pat_g: &AntennaPattern, pat_u: &AntennaPattern, main_g: f64, main_u: f64) -> Self {
        let side_g = 1.0 - main_g;
        let side_u = 1.0 - main_u;
        Self {
            atoms: [
                (pat_g.g_max * pat_u.g_max, main_g * main_u),
                (pat_g.g_max * pat_u.g_min, main_g * side_u),
                (pat_g.g_min * pat_u.g_max, side_g * main_u),
                (pat_g.g_min * pat_u.g_min, side_g * side_u),
            ],
        }
    }

    pub fn gains(&self) -> [f64; 4] {
        self.atoms.map(|(g, _)| g)
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.atoms.map(|(_, p)| p)
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|(g, p)| g * p).sum()
    }

    /// Draws an atom index by inversion of the cumulative masses.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (k, &(_, p)) in self.atoms.iter().enumerate() {
            acc += p;
            if u < acc {
                return k;
            }
        }
        // Rounding left the total a hair under 1: use the last atom with mass.
        (0..4).rev().find(|&k| self.atoms[k].1 > 0.0).unwrap_or(3)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.atoms[self.sample_index(rng)].0
    }
}

/// Gain distribution of an interfering backhaul link with randomly oriented beams.
pub fn interferer_gain_pmf(pat_g: &AntennaPattern, pat_u: &AntennaPattern) -> GainDistribution {
    GainDistribution::product(pat_g, pat_u, pat_g.main_lobe_fraction(), pat_u.main_lobe_fraction())
}

/// CDF of the half-normal steering error with scale `sigma` at `x`.
pub fn half_normal_cdf(x: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 1.0;
    }
    libm::erf(x / (std::f64::consts::SQRT_2 * sigma))
}

/// Gain distribution of the serving backhaul link under Gaussian steering errors.
pub fn desired_gain_pmf(
    pat_g: &AntennaPattern,
    pat_u: &AntennaPattern,
    sigma_g: f64,
    sigma_u: f64,
) -> GainDistribution {
    let in_g = half_normal_cdf(pat_g.theta / 2.0, sigma_g);
    let in_u = half_normal_cdf(pat_u.theta / 2.0, sigma_u);
    GainDistribution::product(pat_g, pat_u, in_g, in_u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    #[test]
    fn gain_thresholds() {
        let p = AntennaPattern::default();
        assert_eq!(antenna_gain(0.0, &p).unwrap(), p.g_max);
        assert_eq!(antenna_gain(PI / 2.0, &p).unwrap(), p.g_min);
        assert_eq!(antenna_gain(-PI / 2.0, &p).unwrap(), p.g_min);
        assert!(antenna_gain(PI, &p).is_err());
    }

    #[test]
    fn uniform_angles_hit_main_lobe_at_beam_fraction() {
        let p = AntennaPattern::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let hits = (0..n)
            .filter(|_| antenna_gain(rng.random_range(-PI..PI), &p).unwrap() == p.g_max)
            .count();
        let q = 1.0 / 18.0;
        let sd = (q * (1.0 - q) / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - q).abs() < 3.0 * sd);
    }

    #[test]
    fn interferer_masses() {
        let p = AntennaPattern::default();
        let d = interferer_gain_pmf(&p, &p);
        let probs = d.probabilities();
        assert_relative_eq!(probs[0], 1.0 / 324.0, epsilon = 1e-15);
        assert_relative_eq!(probs[0], 3.086e-3, epsilon = 1e-6);
        assert_relative_eq!(probs[3], 289.0 / 324.0, epsilon = 1e-15);
        assert_relative_eq!(probs.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        let omni = AntennaPattern { theta: 2.0 * PI, ..p };
        assert_eq!(interferer_gain_pmf(&omni, &omni).probabilities(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn desired_masses_under_misalignment() {
        let p = AntennaPattern::default();
        assert_eq!(desired_gain_pmf(&p, &p, 0.0, 0.0).probabilities(), [1.0, 0.0, 0.0, 0.0]);
        let d = desired_gain_pmf(&p, &p, 0.2, 0.2);
        let f = libm::erf(10f64.to_radians() / (0.2 * std::f64::consts::SQRT_2));
        assert_relative_eq!(f, 0.617_154, epsilon = 1e-6);
        assert_relative_eq!(d.probabilities()[0], f * f, epsilon = 1e-15);
        assert_relative_eq!(d.probabilities()[0], 0.380_879, epsilon = 1e-6);
        assert_relative_eq!(d.probabilities()[3], 0.146_571, epsilon = 1e-6);
        let wild = desired_gain_pmf(&p, &p, 1e9, 1e9);
        assert!(wild.probabilities()[3] > 1.0 - 1e-9);
    }

    #[test]
    fn empirical_products_match_interferer_pmf() {
        let p = AntennaPattern::default();
        let pmf = interferer_gain_pmf(&p, &p);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let side_g = antenna_gain(rng.random_range(-PI..PI), &p).unwrap() == p.g_min;
            let side_u = antenna_gain(rng.random_range(-PI..PI), &p).unwrap() == p.g_min;
            counts[2 * usize::from(side_g) + usize::from(side_u)] += 1;
        }
        for (k, &c) in counts.iter().enumerate() {
            let q = pmf.probabilities()[k];
            let sd = (q * (1.0 - q) / n as f64).sqrt();
            assert!((c as f64 / n as f64 - q).abs() < 3.0 * sd + 1e-12, "atom {k}");
        }
    }

    #[test]
    fn pmf_sampler_frequencies() {
        let p = AntennaPattern::default();
        let pmf = desired_gain_pmf(&p, &p, 0.2, 0.5);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[pmf.sample_index(&mut rng)] += 1;
        }
        for k in 0..4 {
            let q = pmf.probabilities()[k];
            let sd = (q * (1.0 - q) / n as f64).sqrt();
            assert!((counts[k] as f64 / n as f64 - q).abs() < 4.0 * sd + 1e-12);
        }
    }
}
