//! Line-of-sight probability models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sigmoid parameters of the ground-to-air access LOS model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccessLosParams {
    /// Environment constant, also the angular offset in degrees.
    pub a: f64,
    /// Steepness in 1/degree.
    pub b: f64,
}

impl Default for AccessLosParams {
    /// Dense urban.
    fn default() -> Self {
        Self { a: 11.95, b: 0.136 }
    }
}

impl AccessLosParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::invalid("los_a", format!("must be positive, got {}", self.a)));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::invalid("los_b", format!("must be positive, got {}", self.b)));
        }
        Ok(())
    }
}

/// Exponential parameters of the air-to-air backhaul LOS model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackhaulLosParams {
    pub c: f64,
    /// Decay in 1/degree.
    pub d: f64,
    pub e: f64,
}

impl Default for BackhaulLosParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            d: 0.106,
            e: 1.0,
        }
    }
}

impl BackhaulLosParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::invalid("bh_c", format!("must be positive, got {}", self.c)));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::invalid("bh_d", format!("must be positive, got {}", self.d)));
        }
        // The probability must stay inside [0, 1] for every elevation in [0°, 90°].
        let low = self.e - self.c;
        let high = self.e - self.c * (-self.d * 90.0).exp();
        if low < -1e-12 || high > 1.0 + 1e-12 {
            return Err(Error::invalid(
                "bh_e",
                format!("LOS probability leaves [0, 1]: spans [{low}, {high}]"),
            ));
        }
        Ok(())
    }
}

/// Parameters of the building-statistics LOS model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ItuLosParams {
    /// Ratio of built-up land area to total land area.
    pub alpha: f64,
    /// Buildings per km².
    pub beta: f64,
    /// Scale of the Rayleigh building-height distribution (m).
    pub gamma: f64,
    pub h_tx: f64,
    pub h_rx: f64,
}

/// Access LOS probability `κ_ul` at 3-D distance `r` from a UAV at height `h_u`.
pub fn los_prob_access(r: f64, h_u: f64, p: &AccessLosParams) -> Result<f64> {
    if r < h_u * (1.0 - 1e-12) {
        return Err(Error::domain(format!(
            "UAV-UE distance {r} is below the UAV height {h_u}"
        )));
    }
    Ok(los_prob_access_unchecked(r, h_u, p))
}

#[inline]
pub(crate) fn los_prob_access_unchecked(r: f64, h_u: f64, p: &AccessLosParams) -> f64 {
    let horizontal = (r * r - h_u * h_u).max(0.0).sqrt();
    let elevation = h_u.atan2(horizontal).to_degrees();
    1.0 / (1.0 + p.a * (-p.b * (elevation - p.a)).exp())
}

/// Backhaul LOS probability `κ_bl` at horizontal distance `r` and height difference `delta_h`.
#[inline]
pub fn los_prob_backhaul(r: f64, delta_h: f64, p: &BackhaulLosParams) -> f64 {
    // atan of the ratio is much cheaper than atan2 and equal for r > 0.
    let elevation = if r > 0.0 { (delta_h / r).atan() } else { delta_h.atan2(r) }.to_degrees();
    (p.e - p.c * (-p.d * elevation).exp()).clamp(0.0, 1.0)
}

/// Number of building rows crossed at horizontal distance `r`, minus one.
fn itu_rows(r: f64, p: &ItuLosParams) -> i64 {
    (r * (p.alpha * p.beta).sqrt() / 1000.0 - 1.0).floor() as i64
}

/// Building-statistics LOS probability at horizontal distance `r`.
///
/// Each crossed building row blocks the ray with the probability that a
/// Rayleigh-distributed building exceeds the ray height at that row.
pub fn los_prob_itu(r: f64, p: &ItuLosParams) -> f64 {
    let m = itu_rows(r, p);
    if m < 0 {
        return 1.0;
    }
    let rows = (m + 1) as f64;
    (0..=m)
        .map(|n| {
            let ray = p.h_tx - (n as f64 + 0.5) * (p.h_tx - p.h_rx) / rows;
            1.0 - (-(ray * ray) / (2.0 * p.gamma * p.gamma)).exp()
        })
        .product()
}
