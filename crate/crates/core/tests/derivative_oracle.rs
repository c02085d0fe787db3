//! Extrapolated derivatives against independent fourth-order stencils.

use skyhaul::analytic::{Analysis, NetworkParams};
use skyhaul::numerics::nth_derivative;

fn five_point(f: &dyn Fn(f64) -> f64, s: f64, k: usize) -> f64 {
    let h = 1e-3 * s;
    let (m2, m1, c, p1, p2) = (f(s - 2.0 * h), f(s - h), f(s), f(s + h), f(s + 2.0 * h));
    match k {
        1 => (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h),
        2 => (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h),
        _ => unreachable!(),
    }
}

#[test]
fn laplace_derivatives_agree_with_stencil() {
    let e = Analysis::new(&NetworkParams::default()).unwrap();
    let bs = |s: f64| e.laplace_bs_interference(s, 120.0).unwrap();
    let uav = |s: f64| e.laplace_uav_interference(s, 200.0, 150.0, 9.0).unwrap();
    let cases: [(&dyn Fn(f64) -> f64, f64); 4] = [(&bs, 3e7), (&bs, 2e8), (&uav, 1e6), (&uav, 2e7)];
    for (f, s) in cases {
        for k in 1..=2 {
            let ours = nth_derivative(f, s, k).unwrap().value;
            let reference = five_point(f, s, k);
            let rel = ((ours - reference) / reference).abs();
            assert!(rel < 1e-3, "s = {s}, k = {k}: {ours} vs {reference}");
        }
    }
}
