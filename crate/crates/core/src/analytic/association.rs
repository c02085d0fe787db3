//! Association probabilities and serving-distance densities of the UE.

use std::f64::consts::PI;

use crate::channel::LinkClass;
use crate::error::{Error, Result};
use crate::geometry::{exclusion_unchecked, ExclusionKind};
use crate::numerics::{try_integrate, try_integrate_semi_infinite_scaled};

use super::{Analysis, AssociationProbs};

impl Analysis {
    /// Horizontal distance beyond which a BS can never win against every UAV.
    ///
    /// Without UAVs every BS distance is admissible.
    pub fn bs_serving_limit(&self) -> f64 {
        let p = &self.params;
        if p.geometry.n_u == 0 {
            return f64::INFINITY;
        }
        let w_p = p.geometry.w_p();
        LinkClass::BOTH
            .iter()
            .map(|&z| exclusion_unchecked(ExclusionKind::BsGivenUav(z), w_p, p))
            .fold(0.0, f64::max)
    }

    /// Probability that no UAV outshines a BS at horizontal distance `x`.
    pub(crate) fn no_uav_closer_than_bs(&self, x: f64) -> Result<f64> {
        let p = &self.params;
        let lo_l = exclusion_unchecked(ExclusionKind::UavGivenBs(LinkClass::Los), x, p);
        let lo_n = exclusion_unchecked(ExclusionKind::UavGivenBs(LinkClass::Nlos), x, p);
        Ok(self.survival.stay(lo_l, lo_n)?.powi(p.geometry.n_u as i32))
    }

    /// Unnormalized density of the serving-BS distance, `A_g · f_Xg(x)`.
    pub(crate) fn bs_serving_weight(&self, x: f64) -> Result<f64> {
        let lambda = self.params.geometry.lambda_g;
        let nearest = 2.0 * PI * lambda * x * (-PI * lambda * x * x).exp();
        if nearest == 0.0 {
            return Ok(0.0);
        }
        Ok(nearest * self.no_uav_closer_than_bs(x)?)
    }

    /// Unnormalized density of the serving-UAV distance, `A_uζ · f_Yuζ(y)`.
    pub(crate) fn uav_serving_weight(&self, class: LinkClass, y: f64) -> Result<f64> {
        let p = &self.params;
        let n_u = p.geometry.n_u;
        if n_u == 0 {
            return Ok(0.0);
        }
        let own = self.survival.density(class, y);
        if own == 0.0 {
            return Ok(0.0);
        }
        let e_bs = exclusion_unchecked(ExclusionKind::BsGivenUav(class), y, p);
        let no_bs = (-PI * p.geometry.lambda_g * e_bs * e_bs).exp();
        let e_other = exclusion_unchecked(ExclusionKind::OtherClassUav(class), y, p);
        let others = match class {
            LinkClass::Los => self.survival.stay(y, e_other)?,
            LinkClass::Nlos => self.survival.stay(e_other, y)?,
        };
        Ok(n_u as f64 * own * no_bs * others.powi(n_u as i32 - 1))
    }

    /// Integral of `g` over the serving-BS distance range.
    pub(crate) fn integrate_bs_range<F>(&self, g: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let limit = self.bs_serving_limit();
        if limit.is_finite() {
            try_integrate(g, 0.0, limit, &self.options.quad)
        } else {
            let scale = 1.0 / (PI * self.params.geometry.lambda_g).sqrt();
            try_integrate_semi_infinite_scaled(g, 0.0, scale, &self.options.quad)
        }
    }

    /// Integral of `g` over the UAV distance support, split at the rim kink.
    pub(crate) fn integrate_uav_range<F>(&self, mut g: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let geom = &self.params.geometry;
        let (a, m, b) = (geom.h_u, geom.w_m(), geom.w_p());
        if m > a && m < b {
            Ok(try_integrate(&mut g, a, m, &self.options.quad)? + try_integrate(&mut g, m, b, &self.options.quad)?)
        } else {
            try_integrate(g, a, b, &self.options.quad)
        }
    }

    /// Probability that the UE associates with a UAV of the given LOS class.
    pub fn assoc_prob_uav(&self, class: LinkClass) -> Result<f64> {
        if self.params.geometry.n_u == 0 {
            return Ok(0.0);
        }
        self.integrate_uav_range(|y| self.uav_serving_weight(class, y))
            .map_err(|e| e.context("UAV association probability"))
    }

    /// Probability that the UE associates with a ground BS.
    pub fn assoc_prob_bs(&self) -> Result<f64> {
        if self.params.geometry.n_u == 0 {
            return Ok(1.0);
        }
        self.integrate_bs_range(|x| self.bs_serving_weight(x))
            .map_err(|e| e.context("BS association probability"))
    }

    /// BS association mass restricted to serving distances below `limit`.
    pub fn assoc_prob_bs_within(&self, limit: f64) -> Result<f64> {
        try_integrate(|x| self.bs_serving_weight(x), 0.0, limit, &self.options.quad)
    }

    pub fn association(&self) -> Result<AssociationProbs> {
        self.association
            .get_or_init(|| {
                Ok(AssociationProbs {
                    a_ul: self.assoc_prob_uav(LinkClass::Los)?,
                    a_un: self.assoc_prob_uav(LinkClass::Nlos)?,
                    a_g: self.assoc_prob_bs()?,
                })
            })
            .clone()
    }

    /// Density of the serving-BS horizontal distance given BS association.
    pub fn serving_pdf_bs(&self, x: f64) -> Result<f64> {
        let limit = self.bs_serving_limit();
        if !(0.0..=limit).contains(&x) {
            return Err(Error::domain(format!("serving BS distance {x} outside [0, {limit}]")));
        }
        let a_g = self.association()?.a_g;
        if a_g == 0.0 {
            return Ok(0.0);
        }
        Ok(self.bs_serving_weight(x)? / a_g)
    }

    /// Density of the serving-UAV distance given association with a UAV of the given class.
    pub fn serving_pdf_uav(&self, class: LinkClass, y: f64) -> Result<f64> {
        let geom = &self.params.geometry;
        if !(geom.h_u..=geom.w_p()).contains(&y) {
            return Err(Error::domain(format!(
                "serving UAV distance {y} outside [{}, {}]",
                geom.h_u,
                geom.w_p()
            )));
        }
        let a = self.association()?.get(class);
        if a == 0.0 {
            return Ok(0.0);
        }
        Ok(self.uav_serving_weight(class, y)? / a)
    }
}

/// Rayleigh nearest-BS mass within `limit`; the UAV-free reference for BS association.
pub fn nearest_bs_within(lambda_g: f64, limit: f64) -> f64 {
    -(-PI * lambda_g * limit * limit).exp_m1()
}

