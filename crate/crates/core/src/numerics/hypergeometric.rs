//! The `₂F₁(1, 1; c; z)` family of the Gauss hypergeometric function.

use super::quadrature::{integrate, QuadratureSpec};
use crate::error::{Error, Result};

/// Above this argument the power series is abandoned for the Euler integral.
pub const SERIES_LIMIT: f64 = 0.9;

/// `₂F₁(1, 1; c; z)` for `c > 1`, `0 ≤ z < 1`, relative error ≤ 1e-9.
pub fn gauss_2f1_11c(c: f64, z: f64) -> Result<f64> {
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::domain(format!("2F1(1,1;c;z) requires c > 1, got c = {c}")));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(Error::domain(format!("2F1(1,1;c;z) requires 0 <= z < 1, got z = {z}")));
    }
    if z <= SERIES_LIMIT {
        Ok(series(c, z))
    } else {
        euler_integral(c, z)
    }
}

/// Power series; consecutive terms satisfy `t_{n+1} / t_n = (n + 1) z / (c + n)`.
pub(crate) fn series(c: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0.0;
    loop {
        let ratio = (n + 1.0) * z / (c + n);
        term *= ratio;
        sum += term;
        n += 1.0;
        // Remaining tail is bounded by a geometric series with the current ratio.
        let tail = if ratio < 1.0 {
            term * ratio / (1.0 - ratio)
        } else {
            term
        };
        if tail <= 1e-17 * sum || n > 100_000.0 {
            return sum;
        }
    }
}

/// Euler representation `(c−1) ∫₀¹ (1−t)^{c−2} / (1−zt) dt`.
///
/// With `v = (1−t)^{c−1}` the endpoint singularity disappears:
/// the integral becomes `∫₀¹ dv / (1 − z + z·v^{1/(c−1)})`.
pub(crate) fn euler_integral(c: f64, z: f64) -> Result<f64> {
    let p = 1.0 / (c - 1.0);
    let spec = QuadratureSpec {
        abs_tol: 1e-300,
        rel_tol: 1e-11,
        max_subdivisions: 4000,
    };
    let one_minus_z = 1.0 - z;
    let f = |v: f64| 1.0 / (one_minus_z + z * v.powf(p));
    // The integrand varies on the scale v ~ ((1−z)/z)^{c−1}; split there.
    let knee = (one_minus_z / z).powf(c - 1.0).clamp(1e-12, 0.5);
    let head = integrate(f, 0.0, knee, &spec)?;
    let tail = integrate(f, knee, 1.0, &spec)?;
    Ok(head + tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_argument_is_one() {
        for c in [1.1, 1.5, 2.0, 7.3] {
            assert_eq!(gauss_2f1_11c(c, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn closed_form_for_c_equal_two() {
        // 2F1(1,1;2;z) = -ln(1-z)/z
        let v = gauss_2f1_11c(2.0, 0.5).unwrap();
        assert_relative_eq!(v, -(0.5f64).ln() / 0.5, max_relative = 1e-12);
        assert_relative_eq!(v, 1.3862944, epsilon = 1e-7);
        for z in [0.05f64, 0.3, 0.89, 0.91, 0.97, 0.999] {
            let exact = -(1.0 - z).ln() / z;
            assert_relative_eq!(gauss_2f1_11c(2.0, z).unwrap(), exact, max_relative = 1e-9);
        }
    }

    #[test]
    fn closed_form_for_c_three_halves() {
        // 2F1(1,1;3/2;z) = arcsin(√z) / √(z(1−z))
        for z in [0.2f64, 0.5, 0.85, 0.93, 0.99, 0.9999] {
            let exact = z.sqrt().asin() / (z * (1.0 - z)).sqrt();
            assert_relative_eq!(gauss_2f1_11c(1.5, z).unwrap(), exact, max_relative = 1e-9);
        }
    }

    #[test]
    fn series_and_integral_agree_near_one() {
        let s = series(1.5, 0.99);
        let i = euler_integral(1.5, 0.99).unwrap();
        assert_relative_eq!(s, i, max_relative = 1e-8);
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(gauss_2f1_11c(1.0, 0.5).is_err());
        assert!(gauss_2f1_11c(2.0, 1.0).is_err());
        assert!(gauss_2f1_11c(2.0, -0.1).is_err());
    }

    proptest::proptest! {
        #[test]
        fn increasing_in_z(c in 1.05f64..4.0, z in 0.0f64..0.995, dz in 1e-4f64..4e-3) {
            let z2 = (z + dz).min(0.999);
            proptest::prop_assume!(z2 > z);
            let lo = gauss_2f1_11c(c, z).unwrap();
            let hi = gauss_2f1_11c(c, z2).unwrap();
            proptest::prop_assert!(hi > lo);
        }
    }
}
