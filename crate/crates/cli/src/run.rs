//! Point evaluation shared by `eval` and `sweep`.

use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use skyhaul::analytic::{AnalyticOptions, Analysis};
use skyhaul::simulator::{simulate, Tally};
use skyhaul::Scheme;

use crate::config::ScenarioConfig;
use crate::error::CliError;

/// Which pipeline produces the numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Analytic,
    Simulate,
    Both,
}

/// Settings common to every subcommand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub mode: Mode,
    pub scheme: Scheme,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub use_cache: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Analytic,
            scheme: Scheme::Aware,
            trials: 20_000,
            seed: 1,
            workers: default_workers(),
            use_cache: true,
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl RunOptions {
    pub fn analytic_options(&self) -> AnalyticOptions {
        AnalyticOptions {
            use_cache: self.use_cache,
            ..AnalyticOptions::default()
        }
    }

    pub(crate) fn pool(&self) -> Result<rayon::ThreadPool, CliError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers.max(1))
            .build()
            .map_err(|e| CliError::Output(format!("cannot start worker pool: {e}")))
    }
}

/// One output line; see [`CSV_HEADER`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub sweep_var: String,
    pub value: Option<f64>,
    pub scheme: Scheme,
    /// `analytic` or `simulate`.
    pub mode: Mode,
    pub p_cov: f64,
    pub p_cov_g: Option<f64>,
    pub p_cov_ul: Option<f64>,
    pub p_cov_un: Option<f64>,
    pub a_g: f64,
    pub a_ul: f64,
    pub a_un: f64,
    pub a_f: f64,
    pub s_backhaul: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub n_trials: Option<u64>,
}

pub const CSV_HEADER: [&str; 16] = [
    "sweep_var",
    "value",
    "scheme",
    "mode",
    "p_cov",
    "p_cov_g",
    "p_cov_ul",
    "p_cov_un",
    "a_g",
    "a_ul",
    "a_un",
    "a_f",
    "s_backhaul",
    "ci_low",
    "ci_high",
    "n_trials",
];

/// Label of the sweep variable on rows that are not part of a sweep.
pub const NO_SWEEP: &str = "none";

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Analytic row plus any warnings raised while computing it.
pub fn analytic_row(cfg: &ScenarioConfig, scheme: Scheme, opts: &RunOptions) -> Result<(Row, Vec<String>), CliError> {
    if scheme == Scheme::Instantaneous {
        return Err(CliError::Config(
            "the instantaneous scheme has no analytic model; use --mode simulate".into(),
        ));
    }
    let params = cfg.to_params()?;
    let engine = Analysis::with_options(&params, opts.analytic_options())?;
    let report = engine.overall_cov(scheme)?;
    let mut warnings = Vec::new();
    if report.exponent_clamped {
        warnings.push(format!(
            "mean UAV interferer count clamped at zero (n_u = {}, h_u = {}, tau_b_db = {})",
            cfg.n_u, cfg.h_u, cfg.tau_b_db
        ));
    }
    let a = report.association;
    let (a_g, a_ul, a_un, a_f) = match report.transmission {
        Some(t) => (t.at_g, t.at_ul, t.at_un, t.at_f),
        None => (a.a_g, a.a_ul, a.a_un, 0.0),
    };
    let uav = cfg.n_u > 0;
    let row = Row {
        sweep_var: NO_SWEEP.into(),
        value: None,
        scheme,
        mode: Mode::Analytic,
        p_cov: report.p_cov,
        p_cov_g: Some(report.p_cov_g),
        p_cov_ul: uav.then_some(report.p_cov_ul),
        p_cov_un: uav.then_some(report.p_cov_un),
        a_g,
        a_ul,
        a_un,
        a_f,
        s_backhaul: finite(report.s_backhaul),
        ci_low: None,
        ci_high: None,
        n_trials: None,
    };
    Ok((row, warnings))
}

/// Simulated row of `scheme` from a finished tally.
pub fn simulated_row(tally: &Tally, scheme: Scheme) -> Row {
    let n = tally.trials as f64;
    let cov = tally.coverage(scheme);
    let cond = |class: usize| {
        let c = tally.conditional_coverage(scheme, class);
        (c.n > 0).then_some(c.estimate)
    };
    let frac = |count: u64| count as f64 / n;
    let (a_g, a_ul, a_un, a_f) = match scheme {
        Scheme::Unaware => (
            frac(tally.association[0]),
            frac(tally.association[1]),
            frac(tally.association[2]),
            0.0,
        ),
        Scheme::Aware => (
            frac(tally.serving_backhaul_ok[0]),
            frac(tally.serving_backhaul_ok[1]),
            frac(tally.serving_backhaul_ok[2]),
            frac(tally.service_failures),
        ),
        // UEs of failed UAVs fall back to a BS.
        Scheme::Instantaneous => (
            frac(tally.association[0] + tally.service_failures),
            frac(tally.serving_backhaul_ok[1]),
            frac(tally.serving_backhaul_ok[2]),
            0.0,
        ),
    };
    Row {
        sweep_var: NO_SWEEP.into(),
        value: None,
        scheme,
        mode: Mode::Simulate,
        p_cov: cov.estimate,
        p_cov_g: cond(0),
        p_cov_ul: cond(1),
        p_cov_un: cond(2),
        a_g,
        a_ul,
        a_un,
        a_f,
        s_backhaul: (tally.backhaul_trials > 0).then(|| tally.backhaul_success().estimate),
        ci_low: Some(cov.low),
        ci_high: Some(cov.high),
        n_trials: Some(tally.trials),
    }
}

pub fn simulate_config(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Tally, CliError> {
    let params = cfg.to_params()?;
    Ok(simulate(&params, opts.trials, opts.seed, opts.workers.max(1))?)
}

/// Rows of one parameter point in the requested mode, analytic first.
pub fn eval_point(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<(Vec<Row>, Vec<String>), CliError> {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    if matches!(opts.mode, Mode::Analytic | Mode::Both) {
        let (row, w) = analytic_row(cfg, opts.scheme, opts)?;
        rows.push(row);
        warnings.extend(w);
    }
    if matches!(opts.mode, Mode::Simulate | Mode::Both) {
        rows.push(simulated_row(&simulate_config(cfg, opts)?, opts.scheme));
    }
    Ok((rows, warnings))
}

pub fn eval(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<(Vec<Row>, Vec<String>), CliError> {
    if opts.mode == Mode::Both && opts.scheme == Scheme::Instantaneous {
        return Err(CliError::Config(
            "the instantaneous scheme has no analytic model; use --mode simulate".into(),
        ));
    }
    eval_point(cfg, opts)
}

/// Evaluates `var = v` for every `v`, rows in input order.
///
/// Analytic points run concurrently on the worker pool; each simulated point
/// uses the whole pool itself.
pub fn sweep(
    cfg: &ScenarioConfig,
    var: &str,
    values: &[f64],
    opts: &RunOptions,
) -> Result<(Vec<Row>, Vec<String>), CliError> {
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(CliError::Config(format!("sweep value {bad} is not finite")));
    }
    if opts.scheme == Scheme::Instantaneous && opts.mode != Mode::Simulate {
        return Err(CliError::Config(
            "the instantaneous scheme has no analytic model; use --mode simulate".into(),
        ));
    }
    let points: Vec<ScenarioConfig> = values
        .iter()
        .map(|&v| cfg.with_number(var, v))
        .collect::<Result<_, _>>()?;
    let analytic: Vec<Option<(Row, Vec<String>)>> = if matches!(opts.mode, Mode::Analytic | Mode::Both) {
        opts.pool()?.install(|| {
            points
                .par_iter()
                .map(|p| analytic_row(p, opts.scheme, opts).map(Some))
                .collect::<Result<_, _>>()
        })?
    } else {
        vec![None; points.len()]
    };
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for ((p, &v), a) in points.iter().zip(values).zip(analytic) {
        let tag = |mut r: Row| {
            r.sweep_var = var.to_string();
            r.value = Some(v);
            r
        };
        if let Some((row, w)) = a {
            rows.push(tag(row));
            warnings.extend(w);
        }
        if matches!(opts.mode, Mode::Simulate | Mode::Both) {
            rows.push(tag(simulated_row(&simulate_config(p, opts)?, opts.scheme)));
        }
    }
    Ok((rows, warnings))
}

/// Writes rows under the fixed header; an empty slice yields the header alone.
pub fn write_rows<W: std::io::Write>(out: W, rows: &[Row]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses `a:b:step` into the inclusive grid `a, a + step, …`.
pub fn parse_range(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("range `{spec}` must be start:stop:step with step > 0"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0 && start.is_finite() && stop.is_finite()) {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor();
    if n < 0.0 {
        return Ok(Vec::new());
    }
    Ok((0..=n as usize).map(|i| start + i as f64 * step).collect())
}

/// Parses a comma-separated list; blank means no values.
pub fn parse_values(list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Config(format!("sweep value `{s}` is not a number")))
        })
        .collect()
}
