//! Conditional and overall access coverage for both transmission schemes.

use crate::channel::LinkClass;
use crate::error::{Error, Result};
use crate::geometry::{exclusion_unchecked, ExclusionKind};
use crate::numerics::try_derivatives_up_to_with_noise;
use crate::Scheme;

use super::laplace::{bs_laplace, uav_laplace};
use super::{Analysis, AwareTransmissionProbs, CoverageReport};

/// Complete Bell polynomial `B_k(g[1], …, g[k])`; `g[0]` is ignored.
fn bell(k: usize, g: &[f64]) -> f64 {
    match k {
        0 => 1.0,
        1 => g[1],
        2 => g[1] * g[1] + g[2],
        3 => g[1].powi(3) + 3.0 * g[1] * g[2] + g[3],
        4 => g[1].powi(4) + 6.0 * g[1] * g[1] * g[2] + 4.0 * g[1] * g[3] + 3.0 * g[2] * g[2] + g[4],
        _ => unreachable!("derivative order is capped at 4"),
    }
}

/// Mean number of UAV interferers seen by the UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct InterfererCount {
    pub value: f64,
    /// The mean-field count fell below zero and was raised to it.
    pub clamped: bool,
}

impl Analysis {
    fn check_scheme(scheme: Scheme) -> Result<()> {
        if scheme == Scheme::Instantaneous {
            return Err(Error::domain(
                "the instantaneous scheme has no analytic model; use simulation",
            ));
        }
        Ok(())
    }

    /// UAV interferer count when a BS serves the UE.
    pub(crate) fn interferers_bs_served(&self, scheme: Scheme) -> Result<InterfererCount> {
        let n_u = self.params.geometry.n_u as f64;
        if n_u == 0.0 {
            return Ok(InterfererCount { value: 0.0, clamped: false });
        }
        let value = match scheme {
            Scheme::Aware => n_u * self.backhaul()?,
            _ => n_u,
        };
        Ok(InterfererCount { value, clamped: false })
    }

    /// UAV interferer count when a UAV serves the UE.
    pub(crate) fn interferers_uav_served(&self, scheme: Scheme) -> Result<InterfererCount> {
        let n_u = self.params.geometry.n_u as f64;
        if n_u == 0.0 {
            return Ok(InterfererCount { value: 0.0, clamped: false });
        }
        let raw = match scheme {
            Scheme::Aware => n_u * self.backhaul()? - 1.0,
            _ => n_u - 1.0,
        };
        Ok(InterfererCount {
            value: raw.max(0.0),
            clamped: raw < 0.0,
        })
    }

    /// Product of the BS and UAV interference transforms seen by a BS-served UE at distance `x`.
    pub(crate) fn bs_served_laplace(&self, s: f64, x: f64, interferers: f64) -> Result<f64> {
        let p = &self.params;
        let lo_l = exclusion_unchecked(ExclusionKind::UavGivenBs(LinkClass::Los), x, p);
        let lo_n = exclusion_unchecked(ExclusionKind::UavGivenBs(LinkClass::Nlos), x, p);
        Ok(bs_laplace(s, x, p)? * uav_laplace(&self.survival, s, lo_l, lo_n, interferers, p, &self.inner)?)
    }

    /// Product of the BS and UAV interference transforms seen by a UE served by a
    /// class-`class` UAV at distance `y`.
    pub(crate) fn uav_served_laplace(&self, class: LinkClass, s: f64, y: f64, interferers: f64) -> Result<f64> {
        let p = &self.params;
        let x_bs = exclusion_unchecked(ExclusionKind::BsGivenUav(class), y, p);
        let other = exclusion_unchecked(ExclusionKind::OtherClassUav(class), y, p);
        let (lo_l, lo_n) = match class {
            LinkClass::Los => (y, other),
            LinkClass::Nlos => (other, y),
        };
        Ok(bs_laplace(s, x_bs, p)? * uav_laplace(&self.survival, s, lo_l, lo_n, interferers, p, &self.inner)?)
    }

    /// Access coverage given BS association.
    pub fn cond_cov_bs(&self, scheme: Scheme) -> Result<f64> {
        Self::check_scheme(scheme)?;
        let p = &self.params;
        let a_g = self.association()?.a_g;
        if a_g == 0.0 {
            return Ok(0.0);
        }
        let interferers = self.interferers_bs_served(scheme)?.value;
        let h2 = p.geometry.h_g * p.geometry.h_g;
        let mass = self
            .integrate_bs_range(|x| {
                let w = self.bs_serving_weight(x)?;
                if w == 0.0 {
                    return Ok(0.0);
                }
                let s = p.tau_a * (x * x + h2).powf(p.eta_g / 2.0) / p.p_g;
                Ok(w * self.bs_served_laplace(s, x, interferers)?)
            })
            .map_err(|e| e.context("BS-served coverage"))?;
        Ok((mass / a_g).clamp(0.0, 1.0))
    }

    /// Access-only coverage given association with a class-`class` UAV.
    pub(crate) fn access_cov_uav(&self, class: LinkClass, interferers: f64) -> Result<f64> {
        let p = &self.params;
        let a = self.association()?.get(class);
        if a == 0.0 {
            return Ok(0.0);
        }
        let m = p.shape(class);
        let eta = p.eta(class);
        let mass = self
            .integrate_uav_range(|y| {
                let w = self.uav_serving_weight(class, y)?;
                if w == 0.0 {
                    return Ok(0.0);
                }
                let s = f64::from(m) * p.tau_a * y.powf(eta) / p.p_u;
                Ok(w * self.gamma_signal_coverage(class, s, y, interferers, m)?)
            })
            .map_err(|e| e.context(&format!("{}-UAV-served coverage", class.label())))?;
        Ok((mass / a).clamp(0.0, 1.0))
    }

    /// `P[Ω ≥ s·I]` for a unit-mean gamma signal of integer shape `m`:
    /// `Σ_{k<m} (−s)^k/k! · L^{(k)}(s)` with `L` the interference transform.
    ///
    /// Derivatives are taken of `ln L`, which is nearly linear in `s`, and
    /// mapped back with complete Bell polynomials: `L^{(k)} = L · B_k(g', …, g^{(k)})`.
    fn gamma_signal_coverage(&self, class: LinkClass, s: f64, y: f64, interferers: f64, m: u32) -> Result<f64> {
        let log_l = |t: f64| -> Result<f64> { Ok(self.uav_served_laplace(class, t, y, interferers)?.ln()) };
        let base = log_l(s)?;
        // L is log-convex, so L(s/2) ≤ √L(s) and every term is at most 2^k √L(s).
        if base < -200.0 {
            return Ok(0.0);
        }
        if m == 1 {
            return Ok(base.exp());
        }
        // ln L inherits the inner quadrature error of every interferer factor.
        let noise = 10.0 * (self.inner.rel_tol * base.abs() + self.inner.abs_tol * interferers.max(1.0) / base.exp());
        let g: Vec<f64> = try_derivatives_up_to_with_noise(log_l, s, m as usize - 1, noise)?
            .iter()
            .map(|d| d.value)
            .collect();
        let mut sum = 0.0;
        let mut coeff = 1.0;
        for k in 0..m as usize {
            if k > 0 {
                coeff *= -s / k as f64;
            }
            sum += coeff * bell(k, &g);
        }
        Ok((base.exp() * sum).clamp(0.0, 1.0))
    }

    /// Coverage given association with a class-`class` UAV.
    ///
    /// The unaware scheme also requires the serving UAV's backhaul to succeed;
    /// the aware scheme conditions on it.
    pub fn cond_cov_uav(&self, class: LinkClass, scheme: Scheme) -> Result<f64> {
        Self::check_scheme(scheme)?;
        let interferers = self.interferers_uav_served(scheme)?.value;
        let access = self.access_cov_uav(class, interferers)?;
        Ok(match scheme {
            Scheme::Unaware => access * self.backhaul()?,
            _ => access,
        })
    }

    /// Transmission, and service-failure, probabilities of the aware scheme.
    pub fn aware_transmission_probs(&self) -> Result<AwareTransmissionProbs> {
        let a = self.association()?;
        let s = self.backhaul()?;
        Ok(AwareTransmissionProbs {
            at_ul: a.a_ul * s,
            at_un: a.a_un * s,
            at_g: a.a_g,
            at_f: (a.a_ul + a.a_un) * (1.0 - s),
        })
    }

    /// Overall coverage with its per-class breakdown.
    pub fn overall_cov(&self, scheme: Scheme) -> Result<CoverageReport> {
        Self::check_scheme(scheme)?;
        let association = self.association()?;
        let s = self.backhaul_or_none()?;
        let s_backhaul = s.unwrap_or(f64::NAN);
        let p_cov_g = self.cond_cov_bs(scheme)?;
        let (p_cov_ul, p_cov_un) = if self.params.geometry.n_u == 0 {
            (0.0, 0.0)
        } else {
            (
                self.cond_cov_uav(LinkClass::Los, scheme)?,
                self.cond_cov_uav(LinkClass::Nlos, scheme)?,
            )
        };
        let (weights, transmission) = match scheme {
            Scheme::Aware if self.params.geometry.n_u > 0 => {
                let t = self.aware_transmission_probs()?;
                ([t.at_g, t.at_ul, t.at_un], Some(t))
            }
            _ => ([association.a_g, association.a_ul, association.a_un], None),
        };
        let p_cov = weights[0] * p_cov_g + weights[1] * p_cov_ul + weights[2] * p_cov_un;
        let exponent_clamped = self.params.geometry.n_u > 0
            && scheme == Scheme::Aware
            && self.interferers_uav_served(scheme)?.clamped;
        Ok(CoverageReport {
            scheme,
            p_cov,
            p_cov_g,
            p_cov_ul,
            p_cov_un,
            association,
            transmission,
            s_backhaul,
            exponent_clamped,
        })
    }

    /// Backhaul probability, or `None` when there are no UAVs to backhaul.
    fn backhaul_or_none(&self) -> Result<Option<f64>> {
        if self.params.geometry.n_u == 0 {
            return Ok(None);
        }
        self.backhaul().map(Some)
    }
}
