//! Numerical differentiation by central differences with Richardson extrapolation.

use crate::error::{Error, Result};

/// Highest derivative order supported.
pub const MAX_ORDER: usize = 4;

/// Relative steps `h₀`; the absolute step is `max(s, 1) · h₀`.
const STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Richardson levels must agree to this relative tolerance.
const AGREEMENT: f64 = 1e-4;

/// Extrapolated derivative together with the disagreement between the last two levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub estimated_error: f64,
}

/// Second-order central stencil for the k-th derivative: offsets (in units of h) and weights.
fn stencil(k: usize) -> &'static [(f64, f64)] {
    match k {
        1 => &[(-1.0, -0.5), (1.0, 0.5)],
        2 => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
        3 => &[(-2.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (2.0, 0.5)],
        4 => &[(-2.0, 1.0), (-1.0, -4.0), (0.0, 6.0), (1.0, -4.0), (2.0, 1.0)],
        _ => &[],
    }
}

/// k-th derivative of `f` at `s > 0`.
pub fn nth_derivative<F>(mut f: F, s: f64, k: usize) -> Result<Derivative>
where
    F: FnMut(f64) -> f64,
{
    try_nth_derivative(|x| Ok(f(x)), s, k)
}

/// Fallible-function form of [`nth_derivative`].
pub fn try_nth_derivative<F>(f: F, s: f64, k: usize) -> Result<Derivative>
where
    F: FnMut(f64) -> Result<f64>,
{
    let all = try_derivatives_up_to(f, s, k)?;
    Ok(all[k])
}

/// Scale multiplying every relative step at `s`.
///
/// Nominally `max(s, 1)`; below `s = 1` the widest stencil could reach `s ≤ 0`,
/// so the scale drops to `s`. One scale serves all levels to keep the steps in ratio 2.
fn step_scale(s: f64) -> f64 {
    let scale = s.max(1.0);
    if 2.0 * scale * STEPS[0] < s {
        scale
    } else {
        s
    }
}

/// Derivatives of orders `0..=k_max` at `s`, sharing function evaluations.
pub fn try_derivatives_up_to<F>(f: F, s: f64, k_max: usize) -> Result<Vec<Derivative>>
where
    F: FnMut(f64) -> Result<f64>,
{
    try_derivatives_up_to_with_noise(f, s, k_max, 0.0)
}

/// As [`try_derivatives_up_to`] for an `f` known only to within `value_noise`
/// (absolute), e.g. one computed by quadrature. The noise, amplified by each
/// stencil, widens the agreement test.
pub fn try_derivatives_up_to_with_noise<F>(mut f: F, s: f64, k_max: usize, value_noise: f64) -> Result<Vec<Derivative>>
where
    F: FnMut(f64) -> Result<f64>,
{
    if k_max > MAX_ORDER {
        return Err(Error::domain(format!("derivative order {k_max} exceeds {MAX_ORDER}")));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("derivative point must be positive, got {s}")));
    }
    let centre = f(s)?;
    let mut out = vec![Derivative {
        value: centre,
        estimated_error: 0.0,
    }];
    if k_max == 0 {
        return Ok(out);
    }
    let reach = if k_max >= 3 { 2 } else { 1 };
    // samples[level][offset + 2] for offsets −2..=2
    let mut samples = [[0.0f64; 5]; 3];
    let mut steps = [0.0; 3];
    let scale = step_scale(s);
    for (level, h0) in STEPS.iter().enumerate() {
        let h = scale * h0;
        steps[level] = h;
        samples[level][2] = centre;
        for offset in 1..=reach {
            let o = offset as f64;
            samples[level][2 + offset] = f(s + o * h)?;
            samples[level][2 - offset] = f(s - o * h)?;
        }
    }
    for k in 1..=k_max {
        let mut levels = [0.0; 3];
        let mut noise: f64 = 0.0;
        for level in 0..3 {
            let h = steps[level];
            let mut acc = 0.0;
            let mut magnitude: f64 = 0.0;
            let mut amplification = 0.0;
            for &(offset, weight) in stencil(k) {
                let v = samples[level][(offset + 2.0) as usize];
                acc += weight * v;
                magnitude = magnitude.max(v.abs());
                amplification += weight.abs();
            }
            let hk = h.powi(k as i32);
            levels[level] = acc / hk;
            // Cancellation floor of the stencil at this step; Richardson
            // multiplies it by at most (1 + 1/3)(1 + 1/15)·... < 2.
            let floor = (1e3 * f64::EPSILON * magnitude).max(value_noise) * amplification;
            noise = noise.max(2.0 * floor / hk);
        }
        out.push(richardson(levels, noise, s, k)?);
    }
    Ok(out)
}

/// Halving h: error terms h², h⁴ are removed with factors 4 and 16.
fn richardson(levels: [f64; 3], noise: f64, s: f64, k: usize) -> Result<Derivative> {
    let r1 = [
        (4.0 * levels[1] - levels[0]) / 3.0,
        (4.0 * levels[2] - levels[1]) / 3.0,
    ];
    let r2 = (16.0 * r1[1] - r1[0]) / 15.0;
    let disagreement = (r2 - r1[1]).abs();
    let allowed = AGREEMENT * r2.abs().max(r1[1].abs()) + noise;
    if disagreement > allowed {
        return Err(Error::NonConvergence {
            estimate: r2,
            error_bound: disagreement,
            context: format!("Richardson extrapolation of order-{k} derivative at s = {s}"),
        });
    }
    Ok(Derivative {
        value: r2,
        estimated_error: disagreement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cubic_second_derivative() {
        let d = nth_derivative(|s| s * s * s, 2.0, 2).unwrap();
        assert_relative_eq!(d.value, 12.0, max_relative = 1e-9);
    }

    #[test]
    fn exponential_first_derivative() {
        let d = nth_derivative(|s| (-3.0 * s).exp(), 0.5, 1).unwrap();
        assert_relative_eq!(d.value, -3.0 * (-1.5f64).exp(), max_relative = 1e-8);
        assert_relative_eq!(d.value, -0.66939, epsilon = 1e-5);
    }

    #[test]
    fn order_zero_is_exact_evaluation() {
        let f = |s: f64| s.sin() + 0.1234;
        let d = nth_derivative(f, 1.7, 0).unwrap();
        assert_eq!(d.value, f(1.7));
    }

    #[test]
    fn orders_three_and_four() {
        let d3 = nth_derivative(|s| s.powi(5), 1.5, 3).unwrap();
        assert_relative_eq!(d3.value, 60.0 * 1.5 * 1.5, max_relative = 1e-7);
        let d4 = nth_derivative(|s| (0.5 * s).exp(), 3.0, 4).unwrap();
        // Fourth differences lose about eps/h⁴ to rounding.
        assert_relative_eq!(d4.value, (1.5f64).exp() / 16.0, max_relative = 1e-5);
    }

    #[test]
    fn large_argument_uses_relative_step() {
        // Laplace-transform-like decay at s ~ 1e6.
        let lambda = 2e-6;
        let d = nth_derivative(|s| (-lambda * s).exp(), 1e6, 2).unwrap();
        assert_relative_eq!(d.value, lambda * lambda * (-2.0f64).exp(), max_relative = 1e-7);
    }

    #[test]
    fn small_argument_keeps_stencil_positive() {
        let d = nth_derivative(
            |s| {
                assert!(s > 0.0);
                s.ln()
            },
            0.01,
            2,
        )
        .unwrap();
        assert_relative_eq!(d.value, -1e4, max_relative = 1e-6);
    }

    #[test]
    fn shared_evaluations_agree_with_single_orders() {
        let f = |s: f64| Ok((-0.7 * s).exp() * s.sin());
        let all = try_derivatives_up_to(f, 2.3, 4).unwrap();
        for k in 0..=4 {
            assert_eq!(all[k], try_nth_derivative(f, 2.3, k).unwrap());
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(nth_derivative(|s| s, 1.0, 5).is_err());
        assert!(nth_derivative(|s| s, 0.0, 1).is_err());
    }

    #[test]
    fn noisy_function_fails_the_agreement_check() {
        let mut n = 0u32;
        let noisy = |s: f64| {
            n = n.wrapping_mul(1_103_515_245).wrapping_add(12345);
            s * s + 1e-3 * f64::from(n % 7)
        };
        assert!(matches!(
            nth_derivative(noisy, 1.0, 2),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn declared_noise_widens_the_check() {
        // Flat function with evaluation noise: the second derivative is zero
        // and the declared noise makes the extrapolation accept that.
        let mut n = 0u32;
        let noisy = |s: f64| {
            n = n.wrapping_mul(1_103_515_245).wrapping_add(12345);
            Ok(3.0 * s + 1e-13 * f64::from(n % 7))
        };
        let d = try_derivatives_up_to_with_noise(noisy, 0.02, 2, 1e-12).unwrap();
        assert_relative_eq!(d[1].value, 3.0, epsilon = 1e-6);
        assert!(d[2].value.abs() < 1e-3);
    }
}
