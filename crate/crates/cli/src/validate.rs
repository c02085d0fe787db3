//! Analytic values against simulation confidence intervals.

use serde::{Deserialize, Serialize};
use skyhaul::analytic::Analysis;
use skyhaul::channel::LinkClass;
use skyhaul::simulator::{Interval, Tally};
use skyhaul::Scheme;

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::run::{simulate_config, RunOptions};

/// Allowance on top of the 95% interval for the model's approximations
/// (independent interferer thinning, the mean-count bound on the Laplace exponent).
pub const DEFAULT_SLACK: f64 = 0.02;

/// Conditional metrics estimated from fewer samples are not judged.
pub const MIN_CONDITIONAL_SAMPLES: u64 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "N/A")]
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub metric: String,
    pub analytic: Option<f64>,
    pub simulated: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub n: u64,
    /// Analytic minus simulated.
    pub delta: Option<f64>,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
    pub slack: f64,
    pub tally: Tally,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| c.metric.as_str())
            .collect()
    }

    pub fn get(&self, metric: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.metric == metric)
    }
}

fn judge(metric: &str, analytic: Option<f64>, sim: Interval, min_n: u64, slack: f64) -> Check {
    let usable = sim.n >= min_n && sim.n > 0;
    let status = match analytic {
        Some(a) if usable => {
            if a >= sim.low - slack && a <= sim.high + slack {
                Status::Pass
            } else {
                Status::Fail
            }
        }
        _ => Status::NotApplicable,
    };
    let simulated = usable.then_some(sim.estimate);
    Check {
        metric: metric.to_string(),
        analytic,
        simulated,
        ci_low: usable.then_some(sim.low),
        ci_high: usable.then_some(sim.high),
        n: sim.n,
        delta: analytic.zip(simulated).map(|(a, s)| a - s),
        status,
    }
}

/// Compares `analytic_cfg` (normally equal to `cfg`) with a simulation of `cfg`.
pub fn validate(
    cfg: &ScenarioConfig,
    analytic_cfg: &ScenarioConfig,
    opts: &RunOptions,
    slack: f64,
) -> Result<Report, CliError> {
    let tally = simulate_config(cfg, opts)?;
    let engine = Analysis::with_options(&analytic_cfg.to_params()?, opts.analytic_options())?;
    let uav = analytic_cfg.n_u > 0 && cfg.n_u > 0;
    let when_uav = |x: Result<f64, skyhaul::Error>| -> Result<Option<f64>, CliError> {
        if uav {
            Ok(Some(x?))
        } else {
            Ok(None)
        }
    };
    let assoc = engine.association()?;
    let mut checks = vec![
        judge("s_backhaul", when_uav(engine.backhaul())?, tally.backhaul_success(), 1, slack),
        judge("a_g", Some(assoc.a_g), tally.association_fraction(0), 1, slack),
        judge("a_ul", uav.then_some(assoc.a_ul), tally.association_fraction(1), 1, slack),
        judge("a_un", uav.then_some(assoc.a_un), tally.association_fraction(2), 1, slack),
        judge(
            "a_f",
            when_uav(engine.aware_transmission_probs().map(|t| t.at_f))?,
            tally.service_failure_rate(),
            1,
            slack,
        ),
    ];
    for scheme in [Scheme::Unaware, Scheme::Aware] {
        let tag = scheme.label();
        checks.push(judge(
            &format!("p_cov_g_{tag}"),
            Some(engine.cond_cov_bs(scheme)?),
            tally.conditional_coverage(scheme, 0),
            MIN_CONDITIONAL_SAMPLES,
            slack,
        ));
        for (class, index, label) in [(LinkClass::Los, 1, "ul"), (LinkClass::Nlos, 2, "un")] {
            checks.push(judge(
                &format!("p_cov_{label}_{tag}"),
                when_uav(engine.cond_cov_uav(class, scheme))?,
                tally.conditional_coverage(scheme, index),
                MIN_CONDITIONAL_SAMPLES,
                slack,
            ));
        }
        checks.push(judge(
            &format!("p_cov_{tag}"),
            Some(engine.overall_cov(scheme)?.p_cov),
            tally.coverage(scheme),
            1,
            slack,
        ));
    }
    Ok(Report { checks, slack, tally })
}

pub fn write_checks<W: std::io::Write>(out: W, checks: &[Check]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for c in checks {
        w.serialize(c)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(low: f64, high: f64, n: u64) -> Interval {
        Interval {
            estimate: 0.5 * (low + high),
            low,
            high,
            n,
        }
    }

    #[test]
    fn slack_widens_the_interval() {
        let ci = interval(0.60, 0.62, 1000);
        assert_eq!(judge("m", Some(0.635), ci, 1, 0.02).status, Status::Pass);
        assert_eq!(judge("m", Some(0.645), ci, 1, 0.02).status, Status::Fail);
        assert_eq!(judge("m", Some(0.585), ci, 1, 0.02).status, Status::Pass);
        assert_eq!(judge("m", Some(0.575), ci, 1, 0.0).status, Status::Fail);
    }

    #[test]
    fn thin_or_missing_data_is_not_judged() {
        let ci = interval(0.0, 1.0, 10);
        let c = judge("m", Some(0.9), ci, MIN_CONDITIONAL_SAMPLES, 0.02);
        assert_eq!(c.status, Status::NotApplicable);
        assert_eq!(c.simulated, None);
        assert_eq!(judge("m", None, interval(0.4, 0.5, 100), 1, 0.02).status, Status::NotApplicable);
    }

    #[test]
    fn terrestrial_only_reports_uav_metrics_as_missing() {
        let cfg = ScenarioConfig::default().with_number("n_u", 0.0).unwrap();
        let opts = RunOptions {
            trials: 2000,
            workers: 2,
            ..RunOptions::default()
        };
        let r = validate(&cfg, &cfg, &opts, DEFAULT_SLACK).unwrap();
        assert!(r.passed(), "{:?}", r.failures());
        for m in ["s_backhaul", "a_ul", "a_un", "a_f", "p_cov_ul_aware", "p_cov_un_unaware"] {
            assert_eq!(r.get(m).unwrap().status, Status::NotApplicable, "{m}");
        }
        assert_eq!(r.get("p_cov_aware").unwrap().status, Status::Pass);
    }
}
