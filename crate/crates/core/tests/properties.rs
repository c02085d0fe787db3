//! Property tests for the analytic model's structural invariants.

use proptest::prelude::*;
use skyhaul::analytic::{db_to_linear, Analysis, NetworkParams};
use skyhaul::channel::LinkClass;
use skyhaul::Scheme;

fn params(h_u: f64, n_u: usize) -> NetworkParams {
    let mut p = NetworkParams::default();
    p.geometry.h_u = h_u;
    p.geometry.n_u = n_u;
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn laplace_transforms_are_in_unit_interval_and_decreasing(
        h_u in 40.0..400.0f64,
        log_s in 4.0..10.0f64,
        x in 0.0..500.0f64,
        lo in 0.0..600.0f64,
        count in 1.0..20.0f64,
    ) {
        let e = Analysis::new(&params(h_u, 10)).unwrap();
        let s = 10f64.powf(log_s);
        let bs = e.laplace_bs_interference(s, x).unwrap();
        let bs2 = e.laplace_bs_interference(2.0 * s, x).unwrap();
        prop_assert!(bs > 0.0 && bs <= 1.0);
        prop_assert!(bs2 <= bs);
        let lo = lo.max(h_u);
        let u = e.laplace_uav_interference(s, lo, lo, count).unwrap();
        let u2 = e.laplace_uav_interference(2.0 * s, lo, lo, count).unwrap();
        prop_assert!(u > 0.0 && u <= 1.0);
        prop_assert!(u2 <= u);
    }

    #[test]
    fn association_sums_to_one(h_u in 30.0..490.0f64, n_u in 1usize..40, v in 0.0..0.9f64) {
        let mut p = params(h_u, n_u);
        p.geometry.v_0 = v * p.geometry.r_u;
        let e = Analysis::new(&p).unwrap();
        let a = e.association().unwrap();
        prop_assert!((a.total() - 1.0).abs() < 1e-4, "{:?}", a);
        let t = e.aware_transmission_probs().unwrap();
        prop_assert!((t.total() - 1.0).abs() < 1e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn backhaul_is_monotone(h_u in 30.0..490.0f64, tau_db in -5.0..25.0f64, sigma in 0.0..1.0f64) {
        let mut p = params(h_u, 10);
        let e = Analysis::new(&p).unwrap();
        let s1 = e.backhaul_prob(db_to_linear(tau_db), false).unwrap();
        let s2 = e.backhaul_prob(db_to_linear(tau_db + 3.0), false).unwrap();
        prop_assert!(s2 <= s1 + 1e-9);
        p.sigma_g = sigma;
        p.sigma_u = sigma;
        let e_mis = Analysis::new(&p).unwrap();
        prop_assert!(e_mis.backhaul_prob(db_to_linear(tau_db), true).unwrap() <= s1 + 1e-9);
    }

    #[test]
    fn conditional_coverage_falls_with_threshold(h_u in 50.0..300.0f64, tau_db in -10.0..15.0f64) {
        let mut lo = params(h_u, 10);
        lo.tau_a = db_to_linear(tau_db);
        let mut hi = lo.clone();
        hi.tau_a = db_to_linear(tau_db + 2.0);
        let (a, b) = (Analysis::new(&lo).unwrap(), Analysis::new(&hi).unwrap());
        for scheme in [Scheme::Unaware, Scheme::Aware] {
            prop_assert!(b.cond_cov_bs(scheme).unwrap() <= a.cond_cov_bs(scheme).unwrap() + 1e-6);
            prop_assert!(
                b.cond_cov_uav(LinkClass::Los, scheme).unwrap()
                    <= a.cond_cov_uav(LinkClass::Los, scheme).unwrap() + 1e-6
            );
        }
    }
}

#[test]
fn aware_dominates_unaware_on_grid() {
    for n_u in [3, 15, 40] {
        for h_u in [60.0, 150.0, 300.0] {
            let e = Analysis::new(&params(h_u, n_u)).unwrap();
            let aware = e.overall_cov(Scheme::Aware).unwrap().p_cov;
            let unaware = e.overall_cov(Scheme::Unaware).unwrap().p_cov;
            assert!(aware >= unaware - 1e-3, "N_u = {n_u}, h_u = {h_u}: {aware} < {unaware}");
        }
    }
}
