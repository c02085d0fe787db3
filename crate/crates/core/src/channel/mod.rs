//! Propagation, LOS, fading and antenna models.

mod antenna;
mod fading;
mod los;

use serde::{Deserialize, Serialize};

pub use antenna::{
    antenna_gain, desired_gain_pmf, half_normal_cdf, interferer_gain_pmf, AntennaPattern,
    GainDistribution,
};
pub use fading::{sample_fading, Fading, FadingParams};
pub(crate) use los::los_prob_access_unchecked;
pub use los::{
    los_prob_access, los_prob_backhaul, los_prob_itu, AccessLosParams, BackhaulLosParams,
    ItuLosParams,
};

use crate::analytic::NetworkParams;
use crate::error::{Error, Result};

/// Line-of-sight state of an aerial link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkClass {
    Los,
    Nlos,
}

impl LinkClass {
    pub const BOTH: [LinkClass; 2] = [LinkClass::Los, LinkClass::Nlos];

    pub fn other(self) -> Self {
        match self {
            LinkClass::Los => LinkClass::Nlos,
            LinkClass::Nlos => LinkClass::Los,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LinkClass::Los => "los",
            LinkClass::Nlos => "nlos",
        }
    }
}

/// A link together with the geometry needed for its mean received power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Link {
    /// Ground BS to UE, by horizontal distance.
    BsUe { horizontal: f64 },
    /// UAV to UE, by 3-D distance.
    UavUe { class: LinkClass, distance: f64 },
    /// BS to UAV backhaul, by horizontal distance.
    BsUav { class: LinkClass, horizontal: f64 },
}

/// Received power of `link` with fading power gain `fading` and beam gain `gain`.
///
/// Access links ignore `gain`.
pub fn received_power(link: Link, fading: f64, gain: f64, p: &NetworkParams) -> Result<f64> {
    match link {
        Link::BsUe { horizontal } => {
            if horizontal < 0.0 {
                return Err(Error::domain(format!("negative horizontal distance {horizontal}")));
            }
            let d2 = horizontal * horizontal + p.geometry.h_g * p.geometry.h_g;
            Ok(p.p_g * d2.powf(-p.eta_g / 2.0) * fading)
        }
        Link::UavUe { class, distance } => {
            if distance <= 0.0 {
                return Err(Error::domain(format!("nonpositive distance {distance}")));
            }
            Ok(p.p_u * distance.powf(-p.eta(class)) * fading)
        }
        Link::BsUav { class, horizontal } => {
            let dh = p.geometry.delta_h();
            let d2 = horizontal * horizontal + dh * dh;
            if horizontal < 0.0 || d2 <= 0.0 {
                return Err(Error::domain(format!("invalid backhaul distance {horizontal}")));
            }
            Ok(p.p_b * gain * p.intercept(class) * d2.powf(-p.eta(class) / 2.0) * fading)
        }
    }
}
