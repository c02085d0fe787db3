use serde::{Deserialize, Serialize};

use crate::channel::{AccessLosParams, AntennaPattern, BackhaulLosParams, FadingParams, LinkClass};
use crate::error::{Error, Result};
use crate::geometry::DeploymentGeometry;

/// Converts a decibel value to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Full scenario description; every quantity is in linear SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub geometry: DeploymentGeometry,
    /// BS access transmit power (W).
    pub p_g: f64,
    /// BS backhaul transmit power (W).
    pub p_b: f64,
    /// UAV access transmit power (W).
    pub p_u: f64,
    pub eta_g: f64,
    pub eta_l: f64,
    pub eta_n: f64,
    /// Backhaul path-loss intercepts.
    pub c_l: f64,
    pub c_n: f64,
    pub fading: FadingParams,
    pub access_los: AccessLosParams,
    pub backhaul_los: BackhaulLosParams,
    pub bs_antenna: AntennaPattern,
    pub uav_antenna: AntennaPattern,
    /// Standard deviations of the beam-steering errors (rad).
    pub sigma_g: f64,
    pub sigma_u: f64,
    /// Backhaul noise power (W).
    pub noise: f64,
    /// Access SIR threshold.
    pub tau_a: f64,
    /// Backhaul SINR threshold.
    pub tau_b: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self {
            geometry: DeploymentGeometry::default(),
            p_g: 20.0,
            p_b: 10.0,
            p_u: 1.0,
            eta_g: 4.0,
            eta_l: 2.5,
            eta_n: 4.0,
            c_l: db_to_linear(-69.8),
            c_n: db_to_linear(-69.8),
            fading: FadingParams::default(),
            access_los: AccessLosParams::default(),
            backhaul_los: BackhaulLosParams::default(),
            bs_antenna: AntennaPattern::default(),
            uav_antenna: AntennaPattern::default(),
            sigma_g: 0.0,
            sigma_u: 0.0,
            noise: 4e-11,
            tau_a: db_to_linear(0.0),
            tau_b: db_to_linear(10.0),
        }
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive and finite, got {v}")))
    }
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        positive("p_g", self.p_g)?;
        positive("p_b", self.p_b)?;
        positive("p_u", self.p_u)?;
        for (field, eta) in [("eta_g", self.eta_g), ("eta_l", self.eta_l), ("eta_n", self.eta_n)] {
            if !(eta > 2.0 && eta.is_finite()) {
                return Err(Error::invalid(field, format!("path-loss exponent must exceed 2, got {eta}")));
            }
        }
        positive("c_l", self.c_l)?;
        positive("c_n", self.c_n)?;
        self.fading.validate()?;
        self.access_los.validate()?;
        self.backhaul_los.validate()?;
        self.bs_antenna.validate("bs_antenna")?;
        self.uav_antenna.validate("uav_antenna")?;
        for (field, s) in [("sigma_g", self.sigma_g), ("sigma_u", self.sigma_u)] {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::invalid(field, format!("must be nonnegative, got {s}")));
            }
        }
        positive("noise", self.noise)?;
        positive("tau_a", self.tau_a)?;
        positive("tau_b", self.tau_b)?;
        Ok(())
    }

    /// Path-loss exponent of an aerial link class.
    #[inline]
    pub fn eta(&self, class: LinkClass) -> f64 {
        match class {
            LinkClass::Los => self.eta_l,
            LinkClass::Nlos => self.eta_n,
        }
    }

    /// Backhaul path-loss intercept of a link class.
    #[inline]
    pub fn intercept(&self, class: LinkClass) -> f64 {
        match class {
            LinkClass::Los => self.c_l,
            LinkClass::Nlos => self.c_n,
        }
    }

    /// Nakagami shape of an aerial link class.
    #[inline]
    pub fn shape(&self, class: LinkClass) -> u32 {
        self.fading.shape(class)
    }

    /// Error-free gain of the serving backhaul link: both main lobes aligned.
    pub fn aligned_gain(&self) -> f64 {
        self.bs_antenna.g_max * self.uav_antenna.g_max
    }
}
