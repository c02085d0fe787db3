//! Helpers shared by the integration tests.
#![allow(dead_code)]

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson χ² p-value of observed counts against expected probabilities.
///
/// Bins are merged left to right until each carries an expected count of at
/// least 5; the leftover mass outside `probs` forms a final bin.
pub fn chi_square_p(observed: &[u64], probs: &[f64], total: u64) -> f64 {
    assert_eq!(observed.len(), probs.len());
    let n = total as f64;
    let outside_obs = total - observed.iter().sum::<u64>();
    let outside_p = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&ob, &p) in observed.iter().zip(probs) {
        o += ob as f64;
        e += p * n;
        if e >= 5.0 {
            bins.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    o += outside_obs as f64;
    e += outside_p * n;
    if e >= 5.0 || bins.is_empty() {
        bins.push((o, e));
    } else if let Some(last) = bins.last_mut() {
        last.0 += o;
        last.1 += e;
    }
    let stat: f64 = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = (bins.len() - 1).max(1) as f64;
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

/// Bin index of `x` in equal-width bins on `[lo, hi)`.
pub fn bin(x: f64, lo: f64, hi: f64, n: usize) -> Option<usize> {
    if x < lo || x >= hi {
        return None;
    }
    Some((((x - lo) / (hi - lo)) * n as f64) as usize).map(|b| b.min(n - 1))
}
