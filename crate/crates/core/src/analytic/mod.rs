//! Semi-analytic coverage engine.
//!
//! [`Analysis`] binds one parameter point and memoizes the quantities shared
//! between metrics (association probabilities, the backhaul probability and
//! the UAV tail tables). The free functions are one-shot conveniences.

mod association;
mod backhaul;
mod coverage;
mod laplace;
mod params;
mod survival;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::channel::LinkClass;
use crate::error::Result;
use crate::numerics::QuadratureSpec;
use crate::Scheme;

pub use association::nearest_bs_within;
pub use backhaul::alzer_constant;
pub use params::{db_to_linear, linear_to_db, NetworkParams};
pub use survival::CACHE_NODES;

use survival::Survival;

/// Numerical settings of the analytic engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticOptions {
    /// Tolerances of the outer integrals.
    pub quad: QuadratureSpec,
    /// Interpolate UAV tail masses from a precomputed table instead of integrating each time.
    pub use_cache: bool,
}

impl Default for AnalyticOptions {
    fn default() -> Self {
        Self {
            quad: QuadratureSpec::default(),
            use_cache: true,
        }
    }
}

/// Association probabilities of the UE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssociationProbs {
    pub a_ul: f64,
    pub a_un: f64,
    pub a_g: f64,
}

impl AssociationProbs {
    pub fn get(&self, class: LinkClass) -> f64 {
        match class {
            LinkClass::Los => self.a_ul,
            LinkClass::Nlos => self.a_un,
        }
    }

    pub fn uav(&self) -> f64 {
        self.a_ul + self.a_un
    }

    pub fn total(&self) -> f64 {
        self.a_ul + self.a_un + self.a_g
    }
}

/// Serving probabilities of the aware scheme, including service failure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AwareTransmissionProbs {
    pub at_ul: f64,
    pub at_un: f64,
    pub at_g: f64,
    pub at_f: f64,
}

impl AwareTransmissionProbs {
    pub fn uav(&self) -> f64 {
        self.at_ul + self.at_un
    }

    pub fn total(&self) -> f64 {
        self.at_ul + self.at_un + self.at_g + self.at_f
    }
}

/// Overall coverage and the quantities it is assembled from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub scheme: Scheme,
    pub p_cov: f64,
    /// Conditional coverage given BS association.
    pub p_cov_g: f64,
    /// Conditional coverage given LOS-UAV association.
    pub p_cov_ul: f64,
    /// Conditional coverage given NLOS-UAV association.
    pub p_cov_un: f64,
    pub association: AssociationProbs,
    /// Aware scheme only.
    pub transmission: Option<AwareTransmissionProbs>,
    /// NaN without UAVs.
    pub s_backhaul: f64,
    /// The aware scheme's mean interferer count was clamped at zero.
    pub exponent_clamped: bool,
}

/// Analytic engine bound to one parameter point.
#[derive(Debug)]
pub struct Analysis {
    params: NetworkParams,
    options: AnalyticOptions,
    /// Tolerances of integrals nested under numerical differentiation.
    inner: QuadratureSpec,
    survival: Survival,
    association: OnceLock<Result<AssociationProbs>>,
    backhaul: OnceLock<Result<f64>>,
    backhaul_assoc: OnceLock<Result<[f64; 2]>>,
}

impl Analysis {
    pub fn new(params: &NetworkParams) -> Result<Self> {
        Self::with_options(params, AnalyticOptions::default())
    }

    pub fn with_options(params: &NetworkParams, options: AnalyticOptions) -> Result<Self> {
        params.validate()?;
        options.quad.validate()?;
        let inner = QuadratureSpec {
            abs_tol: (options.quad.abs_tol * 1e-4).max(1e-300),
            rel_tol: (options.quad.rel_tol * 1e-4).max(1e-13),
            max_subdivisions: options.quad.max_subdivisions,
        };
        let survival = Survival::new(params, options.use_cache, &inner)?;
        Ok(Self {
            params: params.clone(),
            options,
            inner,
            survival,
            association: OnceLock::new(),
            backhaul: OnceLock::new(),
            backhaul_assoc: OnceLock::new(),
        })
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn options(&self) -> &AnalyticOptions {
        &self.options
    }

    /// Laplace transform of the terrestrial interference from BSs beyond horizontal distance `x_lower`.
    pub fn laplace_bs_interference(&self, s: f64, x_lower: f64) -> Result<f64> {
        laplace::bs_laplace(s, x_lower, &self.params)
    }

    /// Laplace transform of the aerial interference from `exponent` UAVs, each
    /// farther than `lower_l` if LOS and `lower_n` if NLOS.
    pub fn laplace_uav_interference(&self, s: f64, lower_l: f64, lower_n: f64, exponent: f64) -> Result<f64> {
        if !(exponent >= 0.0) {
            return Err(crate::Error::domain(format!("interferer count must be nonnegative, got {exponent}")));
        }
        if exponent == 0.0 || s == 0.0 {
            return Ok(1.0);
        }
        match laplace::single_uav_laplace(&self.survival, s, lower_l, lower_n, &self.params, &self.inner)? {
            Some(single) => Ok(single.powf(exponent)),
            None => Err(crate::Error::domain(
                "no UAV can lie beyond the given lower limits; the conditional law is empty",
            )),
        }
    }
}

fn engine(p: &NetworkParams) -> Result<Analysis> {
    Analysis::new(p)
}

pub fn assoc_prob_uav(class: LinkClass, p: &NetworkParams) -> Result<f64> {
    engine(p)?.assoc_prob_uav(class)
}

pub fn assoc_prob_bs(p: &NetworkParams) -> Result<f64> {
    engine(p)?.assoc_prob_bs()
}

pub fn serving_pdf_bs(x: f64, p: &NetworkParams) -> Result<f64> {
    engine(p)?.serving_pdf_bs(x)
}

pub fn serving_pdf_uav(class: LinkClass, y: f64, p: &NetworkParams) -> Result<f64> {
    engine(p)?.serving_pdf_uav(class, y)
}

pub fn laplace_bs_interference(s: f64, x_lower: f64, p: &NetworkParams) -> Result<f64> {
    laplace::bs_laplace(s, x_lower, p)
}

pub fn laplace_uav_interference(s: f64, lower_l: f64, lower_n: f64, exponent: f64, p: &NetworkParams) -> Result<f64> {
    engine(p)?.laplace_uav_interference(s, lower_l, lower_n, exponent)
}

pub fn backhaul_assoc_prob(class: LinkClass, p: &NetworkParams) -> Result<f64> {
    engine(p)?.backhaul_assoc_prob(class)
}

pub fn backhaul_serving_pdf(class: LinkClass, x: f64, p: &NetworkParams) -> Result<f64> {
    engine(p)?.backhaul_serving_pdf(class, x)
}

pub fn backhaul_cond_success(class: LinkClass, tau_b: f64, g0: f64, p: &NetworkParams) -> Result<f64> {
    engine(p)?.backhaul_cond_success(class, tau_b, g0)
}

pub fn backhaul_prob(tau_b: f64, p: &NetworkParams, with_misalignment: bool) -> Result<f64> {
    engine(p)?.backhaul_prob(tau_b, with_misalignment)
}

pub fn cond_cov_bs_unaware(p: &NetworkParams) -> Result<f64> {
    engine(p)?.cond_cov_bs(Scheme::Unaware)
}

pub fn cond_cov_uav_unaware(class: LinkClass, p: &NetworkParams) -> Result<f64> {
    engine(p)?.cond_cov_uav(class, Scheme::Unaware)
}

pub fn overall_cov_unaware(p: &NetworkParams) -> Result<CoverageReport> {
    engine(p)?.overall_cov(Scheme::Unaware)
}

pub fn aware_transmission_probs(p: &NetworkParams) -> Result<AwareTransmissionProbs> {
    engine(p)?.aware_transmission_probs()
}

pub fn cond_cov_bs_aware(p: &NetworkParams) -> Result<f64> {
    engine(p)?.cond_cov_bs(Scheme::Aware)
}

pub fn cond_cov_uav_aware(class: LinkClass, p: &NetworkParams) -> Result<f64> {
    engine(p)?.cond_cov_uav(class, Scheme::Aware)
}

pub fn overall_cov_aware(p: &NetworkParams) -> Result<CoverageReport> {
    engine(p)?.overall_cov(Scheme::Aware)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, integrate_semi_infinite};
    use crate::Error;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn at_height(h_u: f64) -> NetworkParams {
        let mut p = NetworkParams::default();
        p.geometry.h_u = h_u;
        p
    }

    #[test]
    fn association_is_a_distribution() {
        for (h_u, v_0) in [(50.0, 0.0), (110.0, 0.0), (230.0, 0.0), (400.0, 0.0), (150.0, 350.0)] {
            let mut p = at_height(h_u);
            p.geometry.v_0 = v_0;
            let a = Analysis::new(&p).unwrap().association().unwrap();
            assert!(a.a_ul >= 0.0 && a.a_un >= 0.0 && a.a_g >= 0.0);
            assert_relative_eq!(a.total(), 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn serving_densities_normalize() {
        let p = at_height(110.0);
        let e = Analysis::new(&p).unwrap();
        let spec = QuadratureSpec::default();
        let limit = e.bs_serving_limit();
        let bs = integrate(|x| e.serving_pdf_bs(x).unwrap(), 0.0, limit, &spec).unwrap();
        assert_relative_eq!(bs, 1.0, epsilon = 1e-6);
        let geom = p.geometry;
        let uav = integrate(|y| e.serving_pdf_uav(LinkClass::Los, y).unwrap(), geom.h_u, geom.w_p(), &spec).unwrap();
        assert_relative_eq!(uav, 1.0, epsilon = 1e-6);
        assert!(e.serving_pdf_bs(limit + 1.0).is_err());
        assert!(e.serving_pdf_uav(LinkClass::Nlos, geom.h_u - 1.0).is_err());
    }

    #[test]
    fn laplace_at_zero_is_one() {
        let e = Analysis::new(&NetworkParams::default()).unwrap();
        assert_eq!(e.laplace_bs_interference(0.0, 40.0).unwrap(), 1.0);
        assert_eq!(e.laplace_uav_interference(0.0, 100.0, 100.0, 9.0).unwrap(), 1.0);
        let l = e.laplace_bs_interference(1e7, 40.0).unwrap();
        assert!(l > 0.0 && l < 1.0);
    }

    #[test]
    fn bs_laplace_matches_pgfl_quadrature() {
        let p = NetworkParams::default();
        let e = Analysis::new(&p).unwrap();
        let h2 = p.geometry.h_g * p.geometry.h_g;
        for (s, x) in [(1e6, 0.0), (1e8, 50.0), (3e9, 300.0), (1e11, 1000.0)] {
            let gap = integrate_semi_infinite(
                |r| {
                    let rx = s * p.p_g * (r * r + h2).powf(-p.eta_g / 2.0);
                    rx / (1.0 + rx) * r
                },
                x,
                &QuadratureSpec { abs_tol: 1e-12, rel_tol: 1e-11, max_subdivisions: 2000 },
            )
            .unwrap();
            let direct = (-2.0 * PI * p.geometry.lambda_g * gap).exp();
            assert_relative_eq!(e.laplace_bs_interference(s, x).unwrap(), direct, max_relative = 1e-8);
        }
    }

    #[test]
    fn uav_laplace_decreases_with_load() {
        let e = Analysis::new(&NetworkParams::default()).unwrap();
        let one = e.laplace_uav_interference(1e5, 150.0, 150.0, 1.0).unwrap();
        let nine = e.laplace_uav_interference(1e5, 150.0, 150.0, 9.0).unwrap();
        assert_relative_eq!(nine, one.powi(9), max_relative = 1e-12);
        assert!(nine < one && one < 1.0);
        assert!(e.laplace_uav_interference(1e5, 1e6, 1e6, 9.0).is_err());
    }

    #[test]
    fn vanishing_threshold_covers_everyone() {
        let mut p = at_height(110.0);
        p.tau_a = 1e-9;
        let e = Analysis::new(&p).unwrap();
        assert_relative_eq!(e.cond_cov_bs(Scheme::Unaware).unwrap(), 1.0, epsilon = 1e-5);
        let s = e.backhaul().unwrap();
        assert_relative_eq!(e.cond_cov_uav(LinkClass::Los, Scheme::Unaware).unwrap(), s, epsilon = 1e-5);
        assert_relative_eq!(e.cond_cov_uav(LinkClass::Los, Scheme::Aware).unwrap(), 1.0, epsilon = 1e-5);
    }

    #[test]
    fn no_uavs_leaves_terrestrial_network() {
        let mut p = NetworkParams::default();
        p.geometry.n_u = 0;
        let e = Analysis::new(&p).unwrap();
        let a = e.association().unwrap();
        assert_eq!((a.a_g, a.a_ul, a.a_un), (1.0, 0.0, 0.0));
        let r = e.overall_cov(Scheme::Aware).unwrap();
        assert!(r.s_backhaul.is_nan());
        assert!(r.transmission.is_none());
        assert_eq!(r.p_cov, r.p_cov_g);
        assert_eq!(r.p_cov, e.overall_cov(Scheme::Unaware).unwrap().p_cov);
        // Interference-limited PPP with η = 4 and Rayleigh fading has a closed
        // form only at h_g = 0; here just check it lies strictly inside (0, 1).
        assert!(r.p_cov > 0.0 && r.p_cov < 1.0);
    }

    #[test]
    fn instantaneous_has_no_analytic_model() {
        let e = Analysis::new(&NetworkParams::default()).unwrap();
        assert!(matches!(e.overall_cov(Scheme::Instantaneous), Err(Error::Domain(_))));
    }

    #[test]
    fn coverage_decreases_with_threshold() {
        let mut last = 1.0;
        for tau_db in [-5.0, 0.0, 5.0, 10.0] {
            let mut p = at_height(110.0);
            p.tau_a = db_to_linear(tau_db);
            let c = Analysis::new(&p).unwrap().overall_cov(Scheme::Aware).unwrap().p_cov;
            assert!(c < last, "{tau_db} dB: {c} ≥ {last}");
            last = c;
        }
    }

    #[test]
    fn aware_transmission_is_a_distribution() {
        let e = Analysis::new(&at_height(230.0)).unwrap();
        let t = e.aware_transmission_probs().unwrap();
        assert_relative_eq!(t.total(), 1.0, epsilon = 1e-6);
        let r = e.overall_cov(Scheme::Aware).unwrap();
        assert!(!r.exponent_clamped);
        assert!(r.p_cov <= 1.0 - t.at_f + 1e-12);
    }

    #[test]
    fn backhaul_association_and_threshold() {
        let p = at_height(100.0);
        let e = Analysis::new(&p).unwrap();
        let total: f64 = LinkClass::BOTH.iter().map(|&c| e.backhaul_assoc_prob(c).unwrap()).sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-7);
        let mut last = 1.0;
        for tau_db in [-10.0, 0.0, 10.0, 20.0] {
            let s = e.backhaul_prob(db_to_linear(tau_db), false).unwrap();
            assert!(s <= last);
            last = s;
        }
        // Without steering error the misalignment mixture is the aligned value.
        let aligned = e.backhaul_prob(p.tau_b, false).unwrap();
        assert_eq!(e.backhaul_prob(p.tau_b, true).unwrap(), aligned);
    }

    #[test]
    fn misalignment_hurts_backhaul() {
        let mut p = at_height(100.0);
        p.sigma_g = 0.3;
        p.sigma_u = 0.3;
        let e = Analysis::new(&p).unwrap();
        assert!(e.backhaul_prob(p.tau_b, true).unwrap() < e.backhaul_prob(p.tau_b, false).unwrap());
    }

    #[test]
    fn no_backhaul_bs_is_a_domain_error() {
        let mut p = NetworkParams::default();
        p.geometry.delta_b = 0.0;
        let e = Analysis::new(&p).unwrap();
        assert!(e.backhaul().is_err());
    }
}
