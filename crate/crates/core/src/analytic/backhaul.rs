//! Backhaul association and success probability of a UAV.

use std::f64::consts::PI;

use crate::channel::{desired_gain_pmf, interferer_gain_pmf, los_prob_backhaul, LinkClass};
use crate::error::{Error, Result};
use crate::geometry::{exclusion_unchecked, ExclusionKind};
use crate::numerics::{h_bound, integrate, try_integrate_semi_infinite_scaled, QuadratureSpec};

use super::Analysis;

/// `m (m!)^{-1/m}`, the Alzer constant of a gamma CDF with integer shape `m`.
pub fn alzer_constant(m: u32) -> f64 {
    let factorial: f64 = (1..=m).map(f64::from).product();
    f64::from(m) * factorial.powf(-1.0 / f64::from(m))
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

impl Analysis {
    fn backhaul_density(&self) -> Result<f64> {
        let lambda_b = self.params.geometry.lambda_b();
        if lambda_b <= 0.0 {
            return Err(Error::domain("no backhaul-enabled BSs (delta_b = 0)"));
        }
        Ok(lambda_b)
    }

    #[inline]
    fn kappa_b(&self, class: LinkClass, r: f64) -> f64 {
        let k = los_prob_backhaul(r, self.params.geometry.delta_h(), &self.params.backhaul_los);
        match class {
            LinkClass::Los => k,
            LinkClass::Nlos => 1.0 - k,
        }
    }

    /// `∫₀^x κ_b(r) r dr`, the mean count of class-`class` backhaul BSs within `x` over `2πλ_b`.
    fn backhaul_mass_within(&self, class: LinkClass, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let spec = QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-11,
            max_subdivisions: 500,
        };
        let los = integrate(|r| self.kappa_b(LinkClass::Los, r) * r, 0.0, x, &spec)?;
        Ok(match class {
            LinkClass::Los => los,
            LinkClass::Nlos => 0.5 * x * x - los,
        })
    }

    /// Unnormalized serving-distance density: `A_bξ · f_Xbξ(x)`.
    fn backhaul_serving_weight(&self, class: LinkClass, x: f64) -> Result<f64> {
        let lambda_b = self.backhaul_density()?;
        let kappa = self.kappa_b(class, x);
        if kappa == 0.0 || x == 0.0 {
            return Ok(0.0);
        }
        let nearest = 2.0 * PI * lambda_b * x * kappa * (-2.0 * PI * lambda_b * self.backhaul_mass_within(class, x)?).exp();
        if nearest == 0.0 {
            return Ok(0.0);
        }
        let e = exclusion_unchecked(ExclusionKind::Backhaul(class), x, &self.params);
        let excl = (-2.0 * PI * lambda_b * self.backhaul_mass_within(class.other(), e)?).exp();
        Ok(nearest * excl)
    }

    fn outer_scale(&self) -> Result<f64> {
        Ok(1.0 / (PI * self.backhaul_density()?).sqrt())
    }

    /// Probability that a UAV takes its backhaul from a BS of the given LOS class.
    pub fn backhaul_assoc_prob(&self, class: LinkClass) -> Result<f64> {
        let both = self
            .backhaul_assoc
            .get_or_init(|| {
                let scale = self.outer_scale()?;
                let mut out = [0.0; 2];
                for c in LinkClass::BOTH {
                    out[c as usize] = try_integrate_semi_infinite_scaled(
                        |x| self.backhaul_serving_weight(c, x),
                        0.0,
                        scale,
                        &self.options.quad,
                    )
                    .map_err(|e| e.context("backhaul association probability"))?;
                }
                Ok(out)
            })
            .clone()?;
        Ok(both[class as usize])
    }

    /// Density of the serving backhaul BS horizontal distance given its LOS class.
    pub fn backhaul_serving_pdf(&self, class: LinkClass, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::domain(format!("negative backhaul distance {x}")));
        }
        let a = self.backhaul_assoc_prob(class)?;
        if a == 0.0 {
            return Ok(0.0);
        }
        Ok(self.backhaul_serving_weight(class, x)? / a)
    }

    /// Interference exponent `Q + V` for serving class `class` at distance `x`.
    fn backhaul_interference(&self, class: LinkClass, q: u32, x: f64, tau_b: f64, g0: f64) -> Result<f64> {
        let p = &self.params;
        let lambda_b = self.backhaul_density()?;
        let dh = p.geometry.delta_h();
        let gamma = alzer_constant(p.shape(class));
        let serving_loss = (x * x + dh * dh).powf(p.eta(class) / 2.0);
        let atoms = interferer_gain_pmf(&p.bs_antenna, &p.uav_antenna).atoms;
        let spec = QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-9,
            max_subdivisions: self.options.quad.max_subdivisions,
        };
        let mut total = 0.0;
        for (other, lower) in [
            (class, x),
            (class.other(), exclusion_unchecked(ExclusionKind::Backhaul(class), x, p)),
        ] {
            let m = p.shape(other);
            let eta = p.eta(other);
            let base = f64::from(q) * p.intercept(other) * gamma * tau_b * serving_loss
                / (f64::from(m) * p.intercept(class) * g0);
            let integrand = |t: f64| {
                let kappa = self.kappa_b(other, t);
                if kappa == 0.0 {
                    return Ok(0.0);
                }
                let loss = (t * t + dh * dh).powf(-eta / 2.0);
                let h: f64 = atoms.iter().map(|&(g, pk)| pk * h_bound(m, base * g * loss)).sum();
                Ok(h * kappa * t)
            };
            total += try_integrate_semi_infinite_scaled(integrand, lower, lower + dh + 1.0, &spec)?;
        }
        Ok(2.0 * PI * lambda_b * total)
    }

    /// Success mass `A_bξ · S_ξ` for serving class `class` and desired gain `g0`.
    fn backhaul_success_mass(&self, class: LinkClass, tau_b: f64, g0: f64) -> Result<f64> {
        let p = &self.params;
        let m = p.shape(class);
        let gamma = alzer_constant(m);
        let dh = p.geometry.delta_h();
        let scale = self.outer_scale()?;
        let noise_scale = gamma * tau_b * p.noise / (p.p_b * p.intercept(class) * g0);
        try_integrate_semi_infinite_scaled(
            |x| {
                let w = self.backhaul_serving_weight(class, x)?;
                if w == 0.0 {
                    return Ok(0.0);
                }
                let serving_loss = (x * x + dh * dh).powf(p.eta(class) / 2.0);
                let mut sum = 0.0;
                for q in 1..=m {
                    let noise = f64::from(q) * noise_scale * serving_loss;
                    let interference = self.backhaul_interference(class, q, x, tau_b, g0)?;
                    let sign = if q % 2 == 1 { 1.0 } else { -1.0 };
                    sum += sign * binomial(m, q) * (-noise - interference).exp();
                }
                Ok(w * sum)
            },
            0.0,
            scale,
            &self.options.quad,
        )
    }

    /// Backhaul success probability given the serving BS's LOS class, threshold and desired gain.
    pub fn backhaul_cond_success(&self, class: LinkClass, tau_b: f64, g0: f64) -> Result<f64> {
        if !(tau_b > 0.0 && g0 > 0.0) {
            return Err(Error::domain(format!("need tau_b > 0 and g0 > 0, got {tau_b}, {g0}")));
        }
        let a = self.backhaul_assoc_prob(class)?;
        if a == 0.0 {
            return Ok(0.0);
        }
        Ok(self.backhaul_success_mass(class, tau_b, g0)? / a)
    }

    /// Backhaul success probability at a fixed desired-link gain.
    pub fn backhaul_prob_at_gain(&self, tau_b: f64, g0: f64) -> Result<f64> {
        let mut s = 0.0;
        for class in LinkClass::BOTH {
            s += self.backhaul_success_mass(class, tau_b, g0)?;
        }
        Ok(s.clamp(0.0, 1.0))
    }

    /// Backhaul success probability, optionally averaged over beam-steering errors.
    pub fn backhaul_prob(&self, tau_b: f64, with_misalignment: bool) -> Result<f64> {
        let p = &self.params;
        let result = if with_misalignment {
            let pmf = desired_gain_pmf(&p.bs_antenna, &p.uav_antenna, p.sigma_g, p.sigma_u);
            let mut s = 0.0;
            for (g, w) in pmf.atoms {
                if w > 0.0 {
                    s += w * self.backhaul_prob_at_gain(tau_b, g)?;
                }
            }
            Ok(s)
        } else {
            self.backhaul_prob_at_gain(tau_b, p.aligned_gain())
        };
        result.map_err(|e| e.context("backhaul probability"))
    }

    /// Backhaul probability at the configured threshold and steering errors, memoized.
    pub fn backhaul(&self) -> Result<f64> {
        self.backhaul
            .get_or_init(|| self.backhaul_prob(self.params.tau_b, true))
            .clone()
    }
}
