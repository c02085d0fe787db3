//! Distance densities: normalization and agreement with simulated histograms.

mod common;

use approx::assert_relative_eq;
use common::{bin, chi_square_p};
use skyhaul::analytic::{Analysis, NetworkParams};
use skyhaul::channel::LinkClass;
use skyhaul::geometry::{distance_pdf_fw, sample_uav_bpp};
use skyhaul::numerics::{integrate, integrate_semi_infinite, QuadratureSpec};
use skyhaul::simulator::{drop_realization, evaluate_trial, trial_rng, ServingNode};

fn tight() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-10,
        rel_tol: 1e-9,
        max_subdivisions: 2000,
    }
}

#[test]
fn uav_distance_density_normalizes() {
    for v_frac in [0.0, 0.2, 0.8] {
        let mut p = NetworkParams::default();
        p.geometry.v_0 = v_frac * p.geometry.r_u;
        let g = p.geometry;
        let f = |w: f64| distance_pdf_fw(w, &g).unwrap();
        let total = if g.w_m() < g.w_p() {
            integrate(f, g.h_u, g.w_m(), &tight()).unwrap() + integrate(f, g.w_m(), g.w_p(), &tight()).unwrap()
        } else {
            integrate(f, g.h_u, g.w_p(), &tight()).unwrap()
        };
        assert_relative_eq!(total, 1.0, epsilon = 1e-5);
    }
}

#[test]
fn uav_distance_histogram() {
    let mut p = NetworkParams::default();
    p.geometry.v_0 = 0.4 * p.geometry.r_u;
    p.geometry.n_u = 1;
    let g = p.geometry;
    let ue = g.ue();
    let n_bins = 40;
    let (lo, hi) = (g.h_u, g.w_p());
    let mut counts = vec![0u64; n_bins];
    let n = 50_000u64;
    for i in 0..n {
        let w = sample_uav_bpp(&g, &mut trial_rng(17, i))[0].distance(&ue);
        if let Some(b) = bin(w, lo, hi, n_bins) {
            counts[b] += 1;
        }
    }
    let width = (hi - lo) / n_bins as f64;
    let probs: Vec<f64> = (0..n_bins)
        .map(|b| {
            let a = lo + b as f64 * width;
            let f = |w: f64| distance_pdf_fw(w, &g).unwrap();
            let c = a + width;
            // Keep the rim kink on a panel boundary.
            if a < g.w_m() && g.w_m() < c {
                integrate(f, a, g.w_m(), &tight()).unwrap() + integrate(f, g.w_m(), c, &tight()).unwrap()
            } else {
                integrate(f, a, c, &tight()).unwrap()
            }
        })
        .collect();
    let pv = chi_square_p(&counts, &probs, n);
    assert!(pv > 0.01, "p = {pv}");
}

#[test]
fn serving_densities_normalize() {
    for h_u in [60.0, 110.0, 230.0] {
        let mut p = NetworkParams::default();
        p.geometry.h_u = h_u;
        let e = Analysis::new(&p).unwrap();
        let g = p.geometry;
        let bs = integrate(|x| e.serving_pdf_bs(x).unwrap(), 0.0, e.bs_serving_limit(), &tight()).unwrap();
        assert_relative_eq!(bs, 1.0, epsilon = 1e-5);
        for class in LinkClass::BOTH {
            // The mass itself carries the 1e-9 absolute quadrature error, so the
            // normalized density is only good to 1e-5 when the mass exceeds 1e-4.
            if e.association().unwrap().get(class) < 1e-4 {
                continue;
            }
            let uav = integrate(|y| e.serving_pdf_uav(class, y).unwrap(), g.h_u, g.w_p(), &tight()).unwrap();
            assert!((uav - 1.0).abs() < 1e-5, "h_u = {h_u}, {class:?}: {uav}, A = {:?}", e.association().unwrap());
        }
        for class in LinkClass::BOTH {
            // NLOS backhaul service needs every LOS BS beyond a huge radius:
            // its mass is around 1e-13 here and its density is pure round-off.
            if e.backhaul_assoc_prob(class).unwrap() < 1e-8 {
                continue;
            }
            let bh = integrate_semi_infinite(|x| e.backhaul_serving_pdf(class, x).unwrap(), 0.0, &tight()).unwrap();
            assert_relative_eq!(bh, 1.0, epsilon = 1e-5);
        }
    }
}

struct Histograms {
    trials: u64,
    bs: (Vec<u64>, u64),
    uav_los: (Vec<u64>, u64),
    backhaul_los: (Vec<u64>, u64),
    backhaul_nlos: (Vec<u64>, u64),
}

const BS_RANGE: (f64, f64) = (0.0, 400.0);
const UAV_RANGE: (f64, f64) = (100.0, 700.0);
const BH_RANGE: (f64, f64) = (0.0, 500.0);
const BINS: usize = 25;

fn simulated(p: &NetworkParams, n: u64) -> Histograms {
    let mut h = Histograms {
        trials: n,
        bs: (vec![0; BINS], 0),
        uav_los: (vec![0; BINS], 0),
        backhaul_los: (vec![0; BINS], 0),
        backhaul_nlos: (vec![0; BINS], 0),
    };
    let ue = p.geometry.ue();
    for i in 0..n {
        let real = drop_realization(p, &mut trial_rng(23, i));
        let rec = evaluate_trial(&real, p).unwrap();
        match rec.unaware.association {
            ServingNode::Bs(k) => {
                h.bs.1 += 1;
                let x = real.drop.bs_positions[k].horizontal_distance(&ue);
                if let Some(b) = bin(x, BS_RANGE.0, BS_RANGE.1, BINS) {
                    h.bs.0[b] += 1;
                }
            }
            ServingNode::Uav(j, LinkClass::Los) => {
                h.uav_los.1 += 1;
                let y = real.drop.uav_positions[j].distance(&ue);
                if let Some(b) = bin(y, UAV_RANGE.0, UAV_RANGE.1, BINS) {
                    h.uav_los.0[b] += 1;
                }
            }
            ServingNode::Uav(..) => {}
        }
        // Every UAV's backhaul link is an independent sample of the serving law.
        for status in &rec.backhaul {
            let target = match status.class {
                LinkClass::Los => &mut h.backhaul_los,
                LinkClass::Nlos => &mut h.backhaul_nlos,
            };
            target.1 += 1;
            if let Some(b) = bin(status.distance, BH_RANGE.0, BH_RANGE.1, BINS) {
                target.0[b] += 1;
            }
        }
    }
    h
}

fn bin_probs(pdf: impl Fn(f64) -> f64, range: (f64, f64)) -> Vec<f64> {
    let width = (range.1 - range.0) / BINS as f64;
    (0..BINS)
        .map(|b| {
            let a = range.0 + b as f64 * width;
            integrate(&pdf, a, a + width, &QuadratureSpec::default()).unwrap()
        })
        .collect()
}

#[test]
fn serving_distance_histograms() {
    let p = NetworkParams::default();
    let e = Analysis::new(&p).unwrap();
    let h = simulated(&p, 6000);
    assert!(h.trials == 6000);

    let limit = e.bs_serving_limit();
    let probs = bin_probs(|x| if x <= limit { e.serving_pdf_bs(x).unwrap() } else { 0.0 }, BS_RANGE);
    let pv = chi_square_p(&h.bs.0, &probs, h.bs.1);
    assert!(pv > 0.01, "BS serving distance: p = {pv}");

    let w_p = p.geometry.w_p();
    let probs = bin_probs(
        |y| {
            if (p.geometry.h_u..=w_p).contains(&y) {
                e.serving_pdf_uav(LinkClass::Los, y).unwrap()
            } else {
                0.0
            }
        },
        UAV_RANGE,
    );
    let pv = chi_square_p(&h.uav_los.0, &probs, h.uav_los.1);
    assert!(pv > 0.01, "LOS UAV serving distance: p = {pv}");

    // UAVs sit anywhere in a 1 km disk, well inside the 5 km BS disk, so the
    // infinite-plane backhaul law applies up to edge effects beyond 4 km.
    for (class, hist) in [(LinkClass::Los, &h.backhaul_los), (LinkClass::Nlos, &h.backhaul_nlos)] {
        let a = e.backhaul_assoc_prob(class).unwrap();
        let total = h.backhaul_los.1 + h.backhaul_nlos.1;
        let frac = hist.1 as f64 / total as f64;
        // UAV backhaul links in one drop share BSs, so allow a wide band.
        assert!((frac - a).abs() < 0.02, "{class:?}: simulated {frac}, analytic {a}");
        if a < 1e-8 {
            continue;
        }
        let probs = bin_probs(|x| e.backhaul_serving_pdf(class, x).unwrap(), BH_RANGE);
        let pv = chi_square_p(&hist.0, &probs, hist.1);
        assert!(pv > 0.01, "{class:?} backhaul serving distance: p = {pv}");
    }
}
