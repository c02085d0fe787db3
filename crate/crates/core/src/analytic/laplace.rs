//! Laplace transforms of the aggregate interference at the UE.

use std::f64::consts::PI;

use crate::channel::LinkClass;
use crate::error::{Error, Result};
use crate::numerics::{gauss_2f1_11c, h_bound, QuadratureSpec};

use super::survival::Survival;
use super::NetworkParams;

/// Terrestrial interference from BSs farther than horizontal distance `x_lower`.
pub(crate) fn bs_laplace(s: f64, x_lower: f64, p: &NetworkParams) -> Result<f64> {
    if p.eta_g <= 2.0 {
        return Err(Error::domain(format!("BS path-loss exponent must exceed 2, got {}", p.eta_g)));
    }
    if s < 0.0 || x_lower < 0.0 {
        return Err(Error::domain(format!(
            "Laplace argument and lower limit must be nonnegative, got s = {s}, x = {x_lower}"
        )));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let eta = p.eta_g;
    let d = x_lower * x_lower + p.geometry.h_g * p.geometry.h_g;
    let sp = s * p.p_g;
    let far = d.powf(eta / 2.0);
    let z = sp / (far + sp);
    let f21 = gauss_2f1_11c(2.0 - 2.0 / eta, z)?;
    let exponent = 2.0 * PI * p.geometry.lambda_g * sp * d / ((eta - 2.0) * (far + sp)) * f21;
    Ok((-exponent).exp())
}

/// Expected `e^{-s·I}` for one UAV drawn from the conditional law given its
/// LOS class and that it is no closer than `lo_l` (LOS) or `lo_n` (NLOS).
///
/// Returns `None` when that conditioning event has no mass.
pub(crate) fn single_uav_laplace(
    survival: &Survival,
    s: f64,
    lo_l: f64,
    lo_n: f64,
    p: &NetworkParams,
    spec: &QuadratureSpec,
) -> Result<Option<f64>> {
    let mass = survival.stay(lo_l, lo_n)?;
    if mass <= 0.0 {
        return Ok(None);
    }
    if s == 0.0 {
        return Ok(Some(1.0));
    }
    let mut loss = 0.0;
    for (class, lo) in [(LinkClass::Los, lo_l), (LinkClass::Nlos, lo_n)] {
        let m = p.shape(class);
        let eta = p.eta(class);
        let scale = s * p.p_u / f64::from(m);
        loss += survival.integrate_support(
            |v| h_bound(m, scale * v.powf(-eta)) * survival.density(class, v),
            lo,
            survival.upper(),
            spec,
        )?;
    }
    Ok(Some((1.0 - loss / mass).clamp(0.0, 1.0)))
}

/// Aerial interference from `exponent` i.i.d. UAVs.
///
/// A non-integer exponent stands for a mean interferer count.
pub(crate) fn uav_laplace(
    survival: &Survival,
    s: f64,
    lo_l: f64,
    lo_n: f64,
    exponent: f64,
    p: &NetworkParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if exponent == 0.0 || s == 0.0 {
        return Ok(1.0);
    }
    match single_uav_laplace(survival, s, lo_l, lo_n, p, spec)? {
        Some(single) => Ok(single.powf(exponent)),
        // No UAV can sit in the allowed region; nothing interferes.
        None => Ok(1.0),
    }
}
