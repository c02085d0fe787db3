//! Monte-Carlo Laplace transforms of the aggregate access interference.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::stats::{mean_interval, Interval};
use super::trial_rng;
use crate::analytic::NetworkParams;
use crate::channel::{los_prob_access_unchecked, sample_fading, Fading, LinkClass};
use crate::error::{Error, Result};
use crate::geometry::{sample_bs_ppp, sample_uav_bpp};

/// Which interference field to sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LaplaceTarget {
    /// BSs farther than `x_lower` horizontally from the UE.
    BsInterference { x_lower: f64 },
    /// `count` i.i.d. UAVs, each kept only beyond the lower bound of its link class.
    UavInterference { lower_l: f64, lower_n: f64, count: u32 },
    /// As above with a Binomial(`count`, `success_prob`) number of UAVs.
    SuccessfulUavInterference {
        lower_l: f64,
        lower_n: f64,
        count: u32,
        success_prob: f64,
    },
}

const MAX_REJECTIONS: usize = 100_000;

/// Smallest accepted number of Monte-Carlo Laplace samples.
pub const MIN_LAPLACE_SAMPLES: u64 = 1000;

fn conditioned_uav<R: Rng + ?Sized>(p: &NetworkParams, lower_l: f64, lower_n: f64, rng: &mut R) -> Result<f64> {
    let geom = p.geometry;
    let ue = geom.ue();
    let one = crate::geometry::DeploymentGeometry { n_u: 1, ..geom };
    for _ in 0..MAX_REJECTIONS {
        let w = sample_uav_bpp(&one, rng)[0].distance(&ue);
        let class = if rng.random::<f64>() < los_prob_access_unchecked(w, geom.h_u, &p.access_los) {
            LinkClass::Los
        } else {
            LinkClass::Nlos
        };
        let lower = match class {
            LinkClass::Los => lower_l,
            LinkClass::Nlos => lower_n,
        };
        if w >= lower {
            let fading = sample_fading(Fading::Nakagami(p.shape(class)), rng);
            return Ok(p.p_u * w.powf(-p.eta(class)) * fading);
        }
    }
    Err(Error::domain("conditioning region has negligible mass"))
}

fn sample_interference(p: &NetworkParams, target: LaplaceTarget, rng: &mut impl Rng) -> Result<f64> {
    match target {
        LaplaceTarget::BsInterference { x_lower } => {
            let ue = p.geometry.ue();
            let drop = sample_bs_ppp(&p.geometry, rng);
            Ok(drop
                .bs_positions
                .iter()
                .filter(|b| b.horizontal_distance(&ue) >= x_lower)
                .map(|b| p.p_g * b.distance(&ue).powf(-p.eta_g) * sample_fading(Fading::Rayleigh, rng))
                .sum())
        }
        LaplaceTarget::UavInterference { lower_l, lower_n, count } => {
            (0..count).map(|_| conditioned_uav(p, lower_l, lower_n, rng)).sum()
        }
        LaplaceTarget::SuccessfulUavInterference {
            lower_l,
            lower_n,
            count,
            success_prob,
        } => {
            let k = Binomial::new(u64::from(count), success_prob)
                .map_err(|e| Error::invalid("success_prob", e.to_string()))?
                .sample(rng);
            (0..k).map(|_| conditioned_uav(p, lower_l, lower_n, rng)).sum()
        }
    }
}

/// Estimates E[exp(−s·I)] over `n_samples` independent draws.
pub fn mc_laplace(p: &NetworkParams, target: LaplaceTarget, s: f64, n_samples: u64, seed: u64) -> Result<Interval> {
    p.validate()?;
    if !(s >= 0.0) {
        return Err(Error::domain(format!("Laplace argument must be non-negative, got {s}")));
    }
    if n_samples < MIN_LAPLACE_SAMPLES {
        return Err(Error::invalid(
            "n_samples",
            format!("need at least {MIN_LAPLACE_SAMPLES} samples, got {n_samples}"),
        ));
    }
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for i in 0..n_samples {
        let mut rng = trial_rng(seed, i);
        let v = (-s * sample_interference(p, target, &mut rng)?).exp();
        sum += v;
        sum_sq += v * v;
    }
    Ok(mean_interval(sum, sum_sq, n_samples))
}
