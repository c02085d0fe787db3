//! Shared numerical kernels.

mod derivative;
mod hypergeometric;
mod quadrature;

pub use derivative::{
    nth_derivative, try_derivatives_up_to, try_derivatives_up_to_with_noise, try_nth_derivative, Derivative,
    MAX_ORDER,
};
pub use hypergeometric::gauss_2f1_11c;
pub use quadrature::{
    integrate, integrate_semi_infinite, try_integrate, try_integrate_detailed,
    try_integrate_semi_infinite_scaled, Integral, QuadratureSpec,
};

/// `H(m, x) = 1 − (1 + x)^{−m}`, the gamma-CDF bound helper of the backhaul analysis.
pub fn h_bound(m: u32, x: f64) -> f64 {
    debug_assert!(m >= 1 && x >= 0.0);
    // -expm1(-m·ln1p(x)) keeps precision for small x.
    -(-(m as f64) * x.ln_1p()).exp_m1()
}
