//! Interval estimates for Monte-Carlo output.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// A point estimate with a 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
    pub n: u64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.high - self.low)
    }
}

/// Wilson score interval for `successes` out of `n` Bernoulli trials.
///
/// With `n == 0` the estimate is NaN and the interval is [0, 1].
pub fn wilson(successes: u64, n: u64) -> Interval {
    if n == 0 {
        return Interval {
            estimate: f64::NAN,
            low: 0.0,
            high: 1.0,
            n,
        };
    }
    let nf = n as f64;
    let phat = successes as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (phat + z2 / (2.0 * nf)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    Interval {
        estimate: phat,
        low: (center - half).max(0.0),
        high: (center + half).min(1.0),
        n,
    }
}

/// Normal-approximation interval for the mean of `n` samples with the given sums.
pub fn mean_interval(sum: f64, sum_sq: f64, n: u64) -> Interval {
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq / nf - mean * mean) * nf / (nf - 1.0).max(1.0)).max(0.0);
    let half = Z95 * (var / nf).sqrt();
    Interval {
        estimate: mean,
        low: mean - half,
        high: mean + half,
        n,
    }
}
