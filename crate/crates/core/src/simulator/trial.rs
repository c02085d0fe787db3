//! Access-link evaluation of one drop under every scheme.

use serde::{Deserialize, Serialize};

use super::realization::{evaluate_backhaul, BackhaulStatus, NetworkRealization};
use crate::analytic::NetworkParams;
use crate::channel::LinkClass;
use crate::error::{Error, Result};
use crate::Scheme;

/// Which tier and link class serves the UE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServingNode {
    Bs(usize),
    Uav(usize, LinkClass),
}

impl ServingNode {
    /// 0 for a BS, 1 for a LOS UAV, 2 for an NLOS UAV.
    pub fn class_index(self) -> usize {
        match self {
            ServingNode::Bs(_) => 0,
            ServingNode::Uav(_, LinkClass::Los) => 1,
            ServingNode::Uav(_, LinkClass::Nlos) => 2,
        }
    }
}

/// Result of one trial for one scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub scheme: Scheme,
    pub covered: bool,
    /// Node chosen by maximum average received power.
    pub association: ServingNode,
    /// Node that actually transmits; `None` on a service failure.
    pub serving: Option<ServingNode>,
    pub sir: f64,
    pub serving_backhaul_ok: bool,
    pub service_failure: bool,
}

/// Outcomes of all three schemes on one shared drop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub unaware: TrialOutcome,
    pub aware: TrialOutcome,
    pub instantaneous: TrialOutcome,
    /// Per-UAV backhaul links; empty when no BS offers backhaul.
    pub backhaul: Vec<BackhaulStatus>,
    /// Per-UAV backhaul success, false for every UAV when no BS offers backhaul.
    pub uav_backhaul_ok: Vec<bool>,
}

impl TrialRecord {
    pub fn get(&self, scheme: Scheme) -> &TrialOutcome {
        match scheme {
            Scheme::Unaware => &self.unaware,
            Scheme::Aware => &self.aware,
            Scheme::Instantaneous => &self.instantaneous,
        }
    }
}

struct AccessPowers {
    /// Average received power from each BS and UAV.
    bs_mean: Vec<f64>,
    uav_mean: Vec<f64>,
    /// Same with fading applied.
    bs_rx: Vec<f64>,
    uav_rx: Vec<f64>,
}

fn access_powers(real: &NetworkRealization, p: &NetworkParams) -> AccessPowers {
    let ue = p.geometry.ue();
    let bs_mean: Vec<f64> = real
        .drop
        .bs_positions
        .iter()
        .map(|b| p.p_g * b.distance(&ue).powf(-p.eta_g))
        .collect();
    let uav_mean: Vec<f64> = real
        .drop
        .uav_positions
        .iter()
        .zip(&real.uav_class)
        .map(|(u, &c)| p.p_u * u.distance(&ue).powf(-p.eta(c)))
        .collect();
    let bs_rx = bs_mean.iter().zip(&real.bs_fading).map(|(m, f)| m * f).collect();
    let uav_rx = uav_mean.iter().zip(&real.uav_fading).map(|(m, f)| m * f).collect();
    AccessPowers {
        bs_mean,
        uav_mean,
        bs_rx,
        uav_rx,
    }
}

/// Strongest node by average power; ties go to the lowest index, BSs first.
fn strongest(pw: &AccessPowers, real: &NetworkRealization, allow_uav: bool) -> Option<ServingNode> {
    let mut best: Option<(ServingNode, f64)> = None;
    for (i, &m) in pw.bs_mean.iter().enumerate() {
        if best.is_none_or(|(_, b)| m > b) {
            best = Some((ServingNode::Bs(i), m));
        }
    }
    if allow_uav {
        for (j, &m) in pw.uav_mean.iter().enumerate() {
            if best.is_none_or(|(_, b)| m > b) {
                best = Some((ServingNode::Uav(j, real.uav_class[j]), m));
            }
        }
    }
    best.map(|(n, _)| n)
}

/// SIR at the UE; UAVs with `uav_active[j] == false` stay silent.
fn sir(pw: &AccessPowers, serving: ServingNode, uav_active: &[bool]) -> f64 {
    let (skip_bs, skip_uav) = match serving {
        ServingNode::Bs(i) => (Some(i), None),
        ServingNode::Uav(j, _) => (None, Some(j)),
    };
    let bs: f64 = pw
        .bs_rx
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != skip_bs)
        .map(|(_, r)| r)
        .sum();
    let uav: f64 = pw
        .uav_rx
        .iter()
        .enumerate()
        .filter(|&(j, _)| Some(j) != skip_uav && uav_active[j])
        .map(|(_, r)| r)
        .sum();
    let signal = match serving {
        ServingNode::Bs(i) => pw.bs_rx[i],
        ServingNode::Uav(j, _) => pw.uav_rx[j],
    };
    signal / (bs + uav)
}

/// Evaluates a realization under every scheme.
pub fn evaluate_trial(real: &NetworkRealization, p: &NetworkParams) -> Result<TrialRecord> {
    let backhaul = match evaluate_backhaul(real, p) {
        Ok(b) => b,
        Err(Error::NoBackhaulBs) => Vec::new(),
        Err(e) => return Err(e),
    };
    let pw = access_powers(real, p);
    let ok: Vec<bool> = if backhaul.is_empty() {
        vec![false; real.drop.uav_positions.len()]
    } else {
        backhaul.iter().map(|b| b.success).collect()
    };
    let all = vec![true; ok.len()];

    let association = match strongest(&pw, real, true) {
        Some(n) => n,
        None => {
            // No node at all: nobody can be covered.
            let empty = |scheme| TrialOutcome {
                scheme,
                covered: false,
                association: ServingNode::Bs(0),
                serving: None,
                sir: 0.0,
                serving_backhaul_ok: false,
                service_failure: false,
            };
            return Ok(TrialRecord {
                unaware: empty(Scheme::Unaware),
                aware: empty(Scheme::Aware),
                instantaneous: empty(Scheme::Instantaneous),
                backhaul,
                uav_backhaul_ok: ok,
            });
        }
    };
    let serving_ok = match association {
        ServingNode::Bs(_) => true,
        ServingNode::Uav(j, _) => ok[j],
    };

    let s_unaware = sir(&pw, association, &all);
    let unaware = TrialOutcome {
        scheme: Scheme::Unaware,
        covered: s_unaware >= p.tau_a && serving_ok,
        association,
        serving: Some(association),
        sir: s_unaware,
        serving_backhaul_ok: serving_ok,
        service_failure: false,
    };

    let aware = if serving_ok {
        let s = sir(&pw, association, &ok);
        TrialOutcome {
            scheme: Scheme::Aware,
            covered: s >= p.tau_a,
            association,
            serving: Some(association),
            sir: s,
            serving_backhaul_ok: true,
            service_failure: false,
        }
    } else {
        TrialOutcome {
            scheme: Scheme::Aware,
            covered: false,
            association,
            serving: None,
            sir: 0.0,
            serving_backhaul_ok: false,
            service_failure: true,
        }
    };

    let instantaneous = if serving_ok {
        TrialOutcome {
            scheme: Scheme::Instantaneous,
            ..aware
        }
    } else {
        match strongest(&pw, real, false) {
            Some(bs) => {
                let s = sir(&pw, bs, &ok);
                TrialOutcome {
                    scheme: Scheme::Instantaneous,
                    covered: s >= p.tau_a,
                    association,
                    serving: Some(bs),
                    sir: s,
                    serving_backhaul_ok: false,
                    service_failure: false,
                }
            }
            // No BS to fall back to: uncovered, but never a service failure.
            None => TrialOutcome {
                scheme: Scheme::Instantaneous,
                service_failure: false,
                ..aware
            },
        }
    };

    Ok(TrialRecord {
        unaware,
        aware,
        instantaneous,
        backhaul,
        uav_backhaul_ok: ok,
    })
}
