//! Monte-Carlo simulator of the two-tier network.
//!
//! Each trial draws an independent network from its own ChaCha8 stream keyed by
//! `(seed, trial index)`, so results do not depend on the number of workers.

mod laplace;
mod realization;
mod stats;
mod trial;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::NetworkParams;
use crate::channel::LinkClass;
use crate::error::{Error, Result};
use crate::Scheme;

pub use laplace::{mc_laplace, LaplaceTarget, MIN_LAPLACE_SAMPLES};
pub use realization::{drop_realization, evaluate_backhaul, BackhaulLink, BackhaulStatus, NetworkRealization};
pub use stats::{mean_interval, wilson, Interval, Z95};
pub use trial::{evaluate_trial, ServingNode, TrialOutcome, TrialRecord};

/// Smallest accepted number of trials.
pub const MIN_TRIALS: u64 = 100;

/// Random stream for trial `index`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws and evaluates one trial; the record holds every scheme, `scheme` picks one.
pub fn run_trial(p: &NetworkParams, scheme: Scheme, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let real = drop_realization(p, rng);
    Ok(*evaluate_trial(&real, p)?.get(scheme))
}

const SCHEMES: [Scheme; 3] = [Scheme::Unaware, Scheme::Aware, Scheme::Instantaneous];

/// Integer counters accumulated over trials. Merging is order independent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub trials: u64,
    /// Association counts by class index (BS, LOS UAV, NLOS UAV).
    pub association: [u64; 3],
    /// Trials whose associated node has a working backhaul, by class index.
    pub serving_backhaul_ok: [u64; 3],
    /// Covered trials by scheme (unaware, aware, instantaneous) and association class.
    pub covered: [[u64; 3]; 3],
    /// Aware-scheme service failures.
    pub service_failures: u64,
    /// Backhaul trials of the first UAV, its successes and LOS serving links.
    pub backhaul_trials: u64,
    pub backhaul_ok: u64,
    pub backhaul_los: u64,
}

impl Tally {
    pub fn record(&mut self, rec: &TrialRecord) {
        self.trials += 1;
        let class = rec.unaware.association.class_index();
        self.association[class] += 1;
        if rec.unaware.serving_backhaul_ok {
            self.serving_backhaul_ok[class] += 1;
        }
        for (k, &s) in SCHEMES.iter().enumerate() {
            if rec.get(s).covered {
                self.covered[k][class] += 1;
            }
        }
        if rec.aware.service_failure {
            self.service_failures += 1;
        }
        if let Some(&ok) = rec.uav_backhaul_ok.first() {
            self.backhaul_trials += 1;
            self.backhaul_ok += u64::from(ok);
            let los = rec.backhaul.first().is_some_and(|b| b.class == LinkClass::Los);
            self.backhaul_los += u64::from(los);
        }
    }

    pub fn merge(mut self, o: Tally) -> Tally {
        self.trials += o.trials;
        for k in 0..3 {
            self.association[k] += o.association[k];
            self.serving_backhaul_ok[k] += o.serving_backhaul_ok[k];
            for c in 0..3 {
                self.covered[k][c] += o.covered[k][c];
            }
        }
        self.service_failures += o.service_failures;
        self.backhaul_trials += o.backhaul_trials;
        self.backhaul_ok += o.backhaul_ok;
        self.backhaul_los += o.backhaul_los;
        self
    }

    fn scheme_index(scheme: Scheme) -> usize {
        SCHEMES.iter().position(|&s| s == scheme).unwrap_or(0)
    }

    /// Overall coverage of a scheme.
    pub fn coverage(&self, scheme: Scheme) -> Interval {
        wilson(self.covered[Self::scheme_index(scheme)].iter().sum(), self.trials)
    }

    /// Coverage conditioned on the association class.
    ///
    /// Unaware UAV classes count backhaul failures as outages. The aware and
    /// instantaneous UAV classes condition on a working backhaul as well.
    pub fn conditional_coverage(&self, scheme: Scheme, class_index: usize) -> Interval {
        let k = Self::scheme_index(scheme);
        let n = match (scheme, class_index) {
            (_, 0) | (Scheme::Unaware, _) => self.association[class_index],
            _ => self.serving_backhaul_ok[class_index],
        };
        wilson(self.covered[k][class_index], n)
    }

    pub fn association_fraction(&self, class_index: usize) -> Interval {
        wilson(self.association[class_index], self.trials)
    }

    /// Fraction of trials whose associated node transmits, by class index.
    pub fn transmission_fraction(&self, class_index: usize) -> Interval {
        wilson(self.serving_backhaul_ok[class_index], self.trials)
    }

    pub fn service_failure_rate(&self) -> Interval {
        wilson(self.service_failures, self.trials)
    }

    pub fn backhaul_success(&self) -> Interval {
        wilson(self.backhaul_ok, self.backhaul_trials)
    }

    pub fn backhaul_los_fraction(&self) -> Interval {
        wilson(self.backhaul_los, self.backhaul_trials)
    }
}

/// Runs `n_trials` trials on `workers` threads and returns the merged counters.
pub fn simulate(p: &NetworkParams, n_trials: u64, seed: u64, workers: usize) -> Result<Tally> {
    p.validate()?;
    if n_trials < MIN_TRIALS {
        return Err(Error::invalid("n_trials", format!("must be at least {MIN_TRIALS}, got {n_trials}")));
    }
    if workers == 0 {
        return Err(Error::invalid("workers", "must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    pool.install(|| {
        (0..n_trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(seed, i);
                let real = drop_realization(p, &mut rng);
                let mut t = Tally::default();
                t.record(&evaluate_trial(&real, p)?);
                Ok(t)
            })
            .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
    })
}

/// Coverage estimate of one scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub scheme: Scheme,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_trials: u64,
    /// Association counts (BS, LOS UAV, NLOS UAV).
    pub association_counts: [u64; 3],
    pub service_failure_rate: f64,
    pub tally: Tally,
}

impl CoverageEstimate {
    pub fn from_tally(scheme: Scheme, tally: Tally) -> Self {
        let ci = tally.coverage(scheme);
        let failure = match scheme {
            Scheme::Unaware => 0.0,
            Scheme::Aware => tally.service_failure_rate().estimate,
            // Re-association to a BS never leaves the UE unserved while a BS exists.
            Scheme::Instantaneous => 0.0,
        };
        Self {
            scheme,
            estimate: ci.estimate,
            ci_low: ci.low,
            ci_high: ci.high,
            n_trials: tally.trials,
            association_counts: tally.association,
            service_failure_rate: failure,
            tally,
        }
    }
}

/// Estimates the coverage of `scheme` on all available threads.
pub fn estimate(p: &NetworkParams, scheme: Scheme, n_trials: u64, seed: u64) -> Result<CoverageEstimate> {
    estimate_with_workers(p, scheme, n_trials, seed, rayon::current_num_threads().max(1))
}

pub fn estimate_with_workers(
    p: &NetworkParams,
    scheme: Scheme,
    n_trials: u64,
    seed: u64,
    workers: usize,
) -> Result<CoverageEstimate> {
    Ok(CoverageEstimate::from_tally(scheme, simulate(p, n_trials, seed, workers)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::db_to_linear;

    fn small() -> NetworkParams {
        NetworkParams::default()
    }

    #[test]
    fn same_seed_same_tally() {
        let p = small();
        let a = simulate(&p, 200, 11, 1).unwrap();
        let b = simulate(&p, 200, 11, 1).unwrap();
        assert_eq!(a, b);
        let c = simulate(&p, 200, 12, 1).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let p = small();
        assert_eq!(simulate(&p, 300, 5, 1).unwrap(), simulate(&p, 300, 5, 3).unwrap());
    }

    #[test]
    fn rejects_tiny_runs() {
        assert!(matches!(
            simulate(&small(), 99, 0, 1),
            Err(Error::InvalidParameter { field: "n_trials", .. })
        ));
        assert!(simulate(&small(), 100, 0, 0).is_err());
    }

    #[test]
    fn zero_threshold_makes_schemes_agree() {
        let mut p = small();
        p.tau_b = 0.0;
        for i in 0..50 {
            let mut rng = trial_rng(3, i);
            let rec = evaluate_trial(&drop_realization(&p, &mut rng), &p).unwrap();
            assert!(rec.uav_backhaul_ok.iter().all(|&ok| ok));
            assert_eq!(rec.unaware.covered, rec.aware.covered);
            assert_eq!(TrialOutcome { scheme: Scheme::Aware, ..rec.instantaneous }, rec.aware);
        }
    }

    #[test]
    fn failed_backhaul_everywhere() {
        let mut p = small();
        p.tau_b = db_to_linear(300.0);
        let t = simulate(&p, 300, 9, 1).unwrap();
        assert_eq!(t.backhaul_ok, 0);
        // Only BS-associated UEs can be covered under the unaware and aware schemes.
        for k in 0..2 {
            assert_eq!(t.covered[k][1] + t.covered[k][2], 0);
        }
        assert_eq!(t.service_failures, t.association[1] + t.association[2]);
        assert!(t.coverage(Scheme::Instantaneous).estimate >= t.coverage(Scheme::Aware).estimate);
    }

    #[test]
    fn forced_los_access() {
        let mut p = small();
        p.access_los.a = 1e-12;
        let mut rng = trial_rng(1, 0);
        let real = drop_realization(&p, &mut rng);
        assert!(real.uav_class.iter().all(|&c| c == LinkClass::Los));
    }

    #[test]
    fn no_uavs_means_bs_only() {
        let mut p = small();
        p.geometry.n_u = 0;
        let t = simulate(&p, 200, 2, 1).unwrap();
        assert_eq!(t.association[0], t.trials);
        assert_eq!(t.backhaul_trials, 0);
        assert!(t.backhaul_success().estimate.is_nan());
        assert_eq!(t.coverage(Scheme::Unaware), t.coverage(Scheme::Aware));
    }

    #[test]
    fn estimate_reports_scheme() {
        let e = estimate_with_workers(&small(), Scheme::Aware, 100, 4, 1).unwrap();
        assert_eq!(e.n_trials, 100);
        assert!(e.ci_low <= e.estimate && e.estimate <= e.ci_high);
        assert_eq!(e.association_counts.iter().sum::<u64>(), 100);
    }
}
