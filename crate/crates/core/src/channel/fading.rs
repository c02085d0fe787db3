//! Small-scale fading power gains.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::LinkClass;

/// Nakagami shape parameters of the aerial LOS and NLOS links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FadingParams {
    pub m_l: u32,
    pub m_n: u32,
}

impl Default for FadingParams {
    fn default() -> Self {
        Self { m_l: 3, m_n: 2 }
    }
}

impl FadingParams {
    pub fn validate(&self) -> Result<()> {
        if self.m_l == 0 {
            return Err(Error::invalid("m_l", "Nakagami shape must be at least 1"));
        }
        if self.m_n == 0 {
            return Err(Error::invalid("m_n", "Nakagami shape must be at least 1"));
        }
        Ok(())
    }

    pub fn shape(&self, class: LinkClass) -> u32 {
        match class {
            LinkClass::Los => self.m_l,
            LinkClass::Nlos => self.m_n,
        }
    }
}

/// Power-gain distribution of one link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fading {
    /// Unit-mean exponential.
    Rayleigh,
    /// Unit-mean gamma with integer shape `m` (rate `m`).
    Nakagami(u32),
}

/// Draws one unit-mean power gain.
#[inline]
pub fn sample_fading<R: Rng + ?Sized>(kind: Fading, rng: &mut R) -> f64 {
    match kind {
        Fading::Rayleigh | Fading::Nakagami(1) => rng.sample(Exp1),
        Fading::Nakagami(m) => {
            // Integer shape: sum of m unit exponentials.
            let total: f64 = (0..m).map(|_| rng.sample::<f64, _>(Exp1)).sum();
            total / f64::from(m)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ContinuousCDF, Exp, Gamma};

    fn ks(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
        samples.sort_by(f64::total_cmp);
        let n = samples.len() as f64;
        samples
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn nakagami_three_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_fading(Fading::Nakagami(3), &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // sd of mean = √(1/3 / n); sd of variance ≈ √((μ4 − σ⁴)/n) with μ4 = 2·3·(3+3)/27·... use 5e-3 margin
        assert!((mean - 1.0).abs() < 3.0 * (1.0 / 3.0 / n as f64).sqrt());
        assert!((var - 1.0 / 3.0).abs() < 3e-3);
    }

    #[test]
    fn nakagami_matches_gamma_cdf() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut xs: Vec<f64> = (0..20_000).map(|_| sample_fading(Fading::Nakagami(2), &mut rng)).collect();
        let g = Gamma::new(2.0, 2.0).unwrap();
        let d = ks(&mut xs, |x| g.cdf(x));
        assert!(d < 1.63 / (20_000f64).sqrt(), "KS distance {d}");
    }

    #[test]
    fn rayleigh_median_and_shape_one_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut xs: Vec<f64> = (0..20_000).map(|_| sample_fading(Fading::Rayleigh, &mut rng)).collect();
        let e = Exp::new(1.0).unwrap();
        assert!(ks(&mut xs, |x| e.cdf(x)) < 1.63 / (20_000f64).sqrt());
        let below = xs.iter().filter(|&&x| x < std::f64::consts::LN_2).count() as f64 / xs.len() as f64;
        assert!((below - 0.5).abs() < 3.0 * 0.5 / (20_000f64).sqrt());

        let mut a = ChaCha8Rng::seed_from_u64(2);
        let mut b = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            assert_eq!(
                sample_fading(Fading::Nakagami(1), &mut a),
                sample_fading(Fading::Rayleigh, &mut b)
            );
        }
    }
}
