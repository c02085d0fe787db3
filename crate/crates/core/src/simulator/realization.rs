//! One random network drop and its backhaul links.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::NetworkParams;
use crate::channel::{
    desired_gain_pmf, interferer_gain_pmf, los_prob_access_unchecked, los_prob_backhaul, sample_fading, Fading,
    LinkClass,
};
use crate::error::{Error, Result};
use crate::geometry::{sample_bs_ppp, sample_uav_bpp, PointDrop};

/// Random state of one BS–UAV backhaul link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackhaulLink {
    pub class: LinkClass,
    pub horizontal: f64,
    /// Average received power without beam gain.
    pub mean_power: f64,
    pub fading: f64,
    /// Beam gain if this BS interferes.
    pub interferer_gain: f64,
}

/// Every random quantity of one drop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkRealization {
    pub drop: PointDrop,
    /// Rayleigh fading of each BS–UE link.
    pub bs_fading: Vec<f64>,
    pub uav_class: Vec<LinkClass>,
    pub uav_fading: Vec<f64>,
    /// Indices of the backhaul-enabled BSs.
    pub backhaul_bs: Vec<usize>,
    /// Row-major `[uav][k]` over `backhaul_bs`.
    pub backhaul_links: Vec<BackhaulLink>,
    /// Beam gain of each UAV's serving backhaul link.
    pub desired_gain: Vec<f64>,
}

impl NetworkRealization {
    pub fn links_of(&self, uav: usize) -> &[BackhaulLink] {
        let k = self.backhaul_bs.len();
        &self.backhaul_links[uav * k..(uav + 1) * k]
    }
}

#[inline]
fn bernoulli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> bool {
    rng.random::<f64>() < p
}

/// `d2^(−η/2)`, skipping `powf` for the common exponents 2 and 4.
#[inline]
fn squared_distance_power(d2: f64, eta: f64) -> f64 {
    if eta == 4.0 {
        (d2 * d2).recip()
    } else if eta == 2.0 {
        d2.recip()
    } else {
        d2.powf(-0.5 * eta)
    }
}

/// Draws a full network realization.
pub fn drop_realization<R: Rng + ?Sized>(p: &NetworkParams, rng: &mut R) -> NetworkRealization {
    let geom = &p.geometry;
    let mut drop = sample_bs_ppp(geom, rng);
    drop.uav_positions = sample_uav_bpp(geom, rng);
    let ue = geom.ue();

    let bs_fading = (0..drop.bs_positions.len())
        .map(|_| sample_fading(Fading::Rayleigh, rng))
        .collect();

    let mut uav_class = Vec::with_capacity(geom.n_u);
    let mut uav_fading = Vec::with_capacity(geom.n_u);
    for uav in &drop.uav_positions {
        let z = uav.distance(&ue);
        let class = if bernoulli(los_prob_access_unchecked(z, geom.h_u, &p.access_los), rng) {
            LinkClass::Los
        } else {
            LinkClass::Nlos
        };
        uav_class.push(class);
        uav_fading.push(sample_fading(Fading::Nakagami(p.shape(class)), rng));
    }

    let backhaul_bs: Vec<usize> = (0..drop.bs_positions.len())
        .filter(|&i| drop.bs_backhaul_flag[i])
        .collect();
    let interferer = interferer_gain_pmf(&p.bs_antenna, &p.uav_antenna);
    let desired = desired_gain_pmf(&p.bs_antenna, &p.uav_antenna, p.sigma_g, p.sigma_u);
    let dh = geom.delta_h();
    let dh2 = dh * dh;
    let mut backhaul_links = Vec::with_capacity(geom.n_u * backhaul_bs.len());
    let mut desired_gain = Vec::with_capacity(geom.n_u);
    for uav in &drop.uav_positions {
        for &i in &backhaul_bs {
            let r = uav.horizontal_distance(&drop.bs_positions[i]);
            let class = if bernoulli(los_prob_backhaul(r, dh, &p.backhaul_los), rng) {
                LinkClass::Los
            } else {
                LinkClass::Nlos
            };
            let mean_power = p.p_b * p.intercept(class) * squared_distance_power(r * r + dh2, p.eta(class));
            backhaul_links.push(BackhaulLink {
                class,
                horizontal: r,
                mean_power,
                fading: sample_fading(Fading::Nakagami(p.shape(class)), rng),
                interferer_gain: interferer.sample(rng),
            });
        }
        desired_gain.push(desired.sample(rng));
    }

    NetworkRealization {
        drop,
        bs_fading,
        uav_class,
        uav_fading,
        backhaul_bs,
        backhaul_links,
        desired_gain,
    }
}

/// Backhaul state of one UAV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackhaulStatus {
    /// Index of the serving BS in the drop.
    pub serving_bs: usize,
    pub class: LinkClass,
    /// Horizontal distance to the serving BS.
    pub distance: f64,
    pub sinr: f64,
    pub success: bool,
}

/// Serves each UAV from its minimum-path-loss backhaul BS and evaluates the SINR.
pub fn evaluate_backhaul(real: &NetworkRealization, p: &NetworkParams) -> Result<Vec<BackhaulStatus>> {
    if real.backhaul_bs.is_empty() && !real.drop.uav_positions.is_empty() {
        return Err(Error::NoBackhaulBs);
    }
    let mut out = Vec::with_capacity(real.drop.uav_positions.len());
    let mut received = vec![0.0; real.backhaul_bs.len()];
    for j in 0..real.drop.uav_positions.len() {
        let links = real.links_of(j);
        let mut best = 0;
        let mut best_power = f64::NEG_INFINITY;
        for (k, link) in links.iter().enumerate() {
            received[k] = link.mean_power * link.fading;
            if link.mean_power > best_power {
                best_power = link.mean_power;
                best = k;
            }
        }
        let best_distance = links[best].horizontal;
        let signal = received[best] * real.desired_gain[j];
        let interference: f64 = received
            .iter()
            .zip(links)
            .enumerate()
            .filter(|&(k, _)| k != best)
            .map(|(_, (rx, link))| rx * link.interferer_gain)
            .sum();
        let sinr = signal / (p.noise + interference);
        out.push(BackhaulStatus {
            serving_bs: real.backhaul_bs[best],
            class: links[best].class,
            distance: best_distance,
            sinr,
            success: sinr >= p.tau_b,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::trial_rng;

    #[test]
    fn layout_matches_drop() {
        let mut p = NetworkParams::default();
        p.geometry.delta_b = 0.4;
        let real = drop_realization(&p, &mut trial_rng(0, 0));
        let n_bs = real.drop.bs_positions.len();
        assert_eq!(real.bs_fading.len(), n_bs);
        assert_eq!(real.uav_class.len(), p.geometry.n_u);
        assert!(real.backhaul_bs.iter().all(|&i| real.drop.bs_backhaul_flag[i]));
        assert_eq!(real.backhaul_links.len(), p.geometry.n_u * real.backhaul_bs.len());
        let status = evaluate_backhaul(&real, &p).unwrap();
        assert_eq!(status.len(), p.geometry.n_u);
        for (j, s) in status.iter().enumerate() {
            // The serving BS has the largest average power among backhaul BSs.
            let best = real.links_of(j).iter().map(|l| l.mean_power).fold(0.0, f64::max);
            let k = real.backhaul_bs.iter().position(|&i| i == s.serving_bs).unwrap();
            assert_eq!(real.links_of(j)[k].mean_power, best);
        }
    }

    #[test]
    fn missing_backhaul_bs_is_an_error() {
        let mut p = NetworkParams::default();
        p.geometry.delta_b = 0.0;
        let real = drop_realization(&p, &mut trial_rng(0, 1));
        assert!(real.backhaul_bs.is_empty());
        assert!(matches!(evaluate_backhaul(&real, &p), Err(Error::NoBackhaulBs)));
    }
}
