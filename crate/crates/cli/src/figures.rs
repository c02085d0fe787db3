//! Bundled figure recipes and their reference points.
//!
//! Each recipe fixes the parameter set of one published curve family. The
//! reference points live in `data/figures/<id>.csv` and are compiled in.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use skyhaul::analytic::Analysis;
use skyhaul::simulator::Tally;
use skyhaul::Scheme;

use crate::config::{ScenarioConfig, SIGMA_ALIAS};
use crate::error::CliError;
use crate::run::{simulate_config, Mode, RunOptions};

/// Quantity plotted by a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Backhaul,
    Coverage(Scheme),
    /// Aware transmission probability of a UAV, either class.
    TransmissionUav,
    TransmissionBs,
    ServiceFailure,
}

impl Metric {
    pub fn has_analytic(self) -> bool {
        self != Metric::Coverage(Scheme::Instantaneous)
    }

    pub fn analytic(self, engine: &Analysis) -> Result<f64, CliError> {
        Ok(match self {
            Metric::Backhaul => engine.backhaul()?,
            Metric::Coverage(s) => engine.overall_cov(s)?.p_cov,
            Metric::TransmissionUav => {
                let t = engine.aware_transmission_probs()?;
                t.at_ul + t.at_un
            }
            Metric::TransmissionBs => engine.aware_transmission_probs()?.at_g,
            Metric::ServiceFailure => engine.aware_transmission_probs()?.at_f,
        })
    }

    pub fn simulated(self, t: &Tally) -> f64 {
        match self {
            Metric::Backhaul => t.backhaul_success().estimate,
            Metric::Coverage(s) => t.coverage(s).estimate,
            Metric::TransmissionUav => t.transmission_fraction(1).estimate + t.transmission_fraction(2).estimate,
            Metric::TransmissionBs => t.transmission_fraction(0).estimate,
            Metric::ServiceFailure => t.service_failure_rate().estimate,
        }
    }
}

pub struct Curve {
    pub name: &'static str,
    /// Settings on top of the defaults, applied in order.
    pub set: &'static [(&'static str, f64)],
    pub metric: Metric,
}

pub struct Figure {
    pub id: &'static str,
    pub title: &'static str,
    /// Config key swept along the x axis.
    pub x_key: &'static str,
    pub curves: &'static [Curve],
    data: &'static str,
}

const AWARE: Metric = Metric::Coverage(Scheme::Aware);
const UNAWARE: Metric = Metric::Coverage(Scheme::Unaware);
const INSTANTANEOUS: Metric = Metric::Coverage(Scheme::Instantaneous);

macro_rules! curve {
    ($name:expr, $metric:expr $(, $k:expr => $v:expr)*) => {
        Curve { name: $name, set: &[$(($k, $v)),*], metric: $metric }
    };
}

pub const FIGURES: &[Figure] = &[
    Figure {
        id: "backhaul-vs-height",
        title: "Backhaul probability against UAV height",
        x_key: "h_u",
        curves: &[
            curve!("tau_b_db=5", Metric::Backhaul, "tau_b_db" => 5.0),
            curve!("tau_b_db=10", Metric::Backhaul, "tau_b_db" => 10.0),
            curve!("tau_b_db=15", Metric::Backhaul, "tau_b_db" => 15.0),
            curve!("tau_b_db=20", Metric::Backhaul, "tau_b_db" => 20.0),
        ],
        data: include_str!("../data/figures/backhaul-vs-height.csv"),
    },
    Figure {
        id: "association-vs-height",
        title: "Aware transmission and service-failure probabilities against UAV height",
        x_key: "h_u",
        curves: &[
            curve!("a_u", Metric::TransmissionUav),
            curve!("a_g", Metric::TransmissionBs),
            curve!("a_f", Metric::ServiceFailure),
        ],
        data: include_str!("../data/figures/association-vs-height.csv"),
    },
    Figure {
        id: "coverage-vs-height",
        title: "Aware coverage against UAV height",
        x_key: "h_u",
        curves: &[
            curve!("tau_a_db=-5", AWARE, "tau_a_db" => -5.0),
            curve!("tau_a_db=0", AWARE, "tau_a_db" => 0.0),
            curve!("tau_a_db=5", AWARE, "tau_a_db" => 5.0),
            curve!("tau_a_db=10", AWARE, "tau_a_db" => 10.0),
        ],
        data: include_str!("../data/figures/coverage-vs-height.csv"),
    },
    Figure {
        id: "coverage-vs-nu",
        title: "Aware and unaware coverage against the number of UAVs",
        x_key: "n_u",
        curves: &[
            curve!("aware tau_b_db=10", AWARE, "tau_b_db" => 10.0),
            curve!("unaware tau_b_db=10", UNAWARE, "tau_b_db" => 10.0),
            curve!("aware tau_b_db=15", AWARE, "tau_b_db" => 15.0),
            curve!("unaware tau_b_db=15", UNAWARE, "tau_b_db" => 15.0),
            curve!("aware tau_b_db=20", AWARE, "tau_b_db" => 20.0),
            curve!("unaware tau_b_db=20", UNAWARE, "tau_b_db" => 20.0),
        ],
        data: include_str!("../data/figures/coverage-vs-nu.csv"),
    },
    Figure {
        id: "coverage-vs-misalignment",
        title: "Aware coverage against the backhaul threshold under beam-steering errors",
        x_key: "tau_b_db",
        curves: &[
            curve!("sigma=0", AWARE, SIGMA_ALIAS => 0.0),
            curve!("sigma=0.2", AWARE, SIGMA_ALIAS => 0.2),
            curve!("sigma=0.5", AWARE, SIGMA_ALIAS => 0.5),
            curve!("sigma=1", AWARE, SIGMA_ALIAS => 1.0),
        ],
        data: include_str!("../data/figures/coverage-vs-misalignment.csv"),
    },
    Figure {
        id: "coverage-vs-density",
        title: "Aware coverage against UAV height for several BS densities",
        x_key: "h_u",
        curves: &[
            curve!("lambda_g_per_km2=1", AWARE, "lambda_g" => 1e-6),
            curve!("lambda_g_per_km2=5", AWARE, "lambda_g" => 5e-6),
            curve!("lambda_g_per_km2=10", AWARE, "lambda_g" => 1e-5),
            curve!("lambda_g_per_km2=20", AWARE, "lambda_g" => 2e-5),
        ],
        data: include_str!("../data/figures/coverage-vs-density.csv"),
    },
    Figure {
        id: "backhaul-vs-fraction",
        title: "Backhaul probability against the fraction of backhaul-enabled BSs",
        x_key: "delta_b",
        curves: &[
            curve!("h_u=30", Metric::Backhaul, "h_u" => 30.0),
            curve!("h_u=100", Metric::Backhaul, "h_u" => 100.0),
            curve!("h_u=300", Metric::Backhaul, "h_u" => 300.0),
            curve!("h_u=500", Metric::Backhaul, "h_u" => 500.0),
        ],
        data: include_str!("../data/figures/backhaul-vs-fraction.csv"),
    },
    Figure {
        id: "coverage-vs-fraction",
        title: "Aware coverage against the fraction of backhaul-enabled BSs",
        x_key: "delta_b",
        curves: &[
            curve!("h_u=30", AWARE, "h_u" => 30.0),
            curve!("h_u=100", AWARE, "h_u" => 100.0),
            curve!("h_u=300", AWARE, "h_u" => 300.0),
            curve!("h_u=500", AWARE, "h_u" => 500.0),
        ],
        data: include_str!("../data/figures/coverage-vs-fraction.csv"),
    },
    Figure {
        id: "aware-vs-instantaneous",
        title: "Aware transmission against instantaneous re-association",
        x_key: "n_u",
        curves: &[
            curve!("instantaneous h_u=30", INSTANTANEOUS, "h_u" => 30.0),
            curve!("aware h_u=30", AWARE, "h_u" => 30.0),
            curve!("instantaneous h_u=120", INSTANTANEOUS, "h_u" => 120.0),
            curve!("aware h_u=120", AWARE, "h_u" => 120.0),
            curve!("instantaneous h_u=200", INSTANTANEOUS, "h_u" => 200.0),
            curve!("aware h_u=200", AWARE, "h_u" => 200.0),
        ],
        data: include_str!("../data/figures/aware-vs-instantaneous.csv"),
    },
];

pub fn figure(id: &str) -> Result<&'static Figure, CliError> {
    FIGURES.iter().find(|f| f.id == id).ok_or_else(|| {
        let known: Vec<&str> = FIGURES.iter().map(|f| f.id).collect();
        CliError::Config(format!("unknown figure `{id}`; known: {}", known.join(", ")))
    })
}

/// Whether a reference point was read off an analytic curve or a simulation marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Analytic,
    Simulation,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ReferencePoint {
    pub curve: String,
    pub kind: Kind,
    pub x: f64,
    pub reference: f64,
}

/// Output line of `reproduce`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub figure: String,
    pub curve: String,
    pub kind: Kind,
    pub x: f64,
    pub reference: f64,
    pub computed: f64,
    pub abs_dev: f64,
    /// Pipeline that produced `computed`: `analytic` or `simulate`.
    pub method: Mode,
}

/// Largest deviation over the points of one curve and kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDeviation {
    pub figure: String,
    pub curve: String,
    pub kind: Kind,
    pub points: usize,
    pub max_abs_dev: f64,
    pub at_x: f64,
}

impl Figure {
    pub fn reference_points(&self) -> Result<Vec<ReferencePoint>, CliError> {
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(self.data.as_bytes());
        let points: Vec<ReferencePoint> = r.deserialize().collect::<Result<_, _>>()?;
        for p in &points {
            self.curve(&p.curve)?;
        }
        Ok(points)
    }

    pub fn curve(&self, name: &str) -> Result<&Curve, CliError> {
        self.curves
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| CliError::Config(format!("figure {} has no curve `{name}`", self.id)))
    }

    /// Scenario of one curve at abscissa `x`.
    pub fn scenario(&self, base: &ScenarioConfig, curve: &Curve, x: f64) -> Result<ScenarioConfig, CliError> {
        let mut cfg = base.clone();
        for &(k, v) in curve.set {
            cfg = cfg.with_number(k, v)?;
        }
        cfg.with_number(self.x_key, x)
    }
}

/// Which pipeline evaluates a reference point under `mode`.
///
/// Analytic curves are always checked against the analytic engine. Simulation
/// markers follow the mode, and curves without an analytic model are simulated.
fn method_for(point: &ReferencePoint, metric: Metric, mode: Mode) -> Mode {
    if !metric.has_analytic() {
        return Mode::Simulate;
    }
    match (point.kind, mode) {
        (Kind::Simulation, Mode::Simulate | Mode::Both) => Mode::Simulate,
        _ => Mode::Analytic,
    }
}

/// Runs a recipe against every bundled reference point.
pub fn reproduce(
    fig: &Figure,
    base: &ScenarioConfig,
    opts: &RunOptions,
) -> Result<(Vec<ComparisonRow>, Vec<CurveDeviation>), CliError> {
    let points = fig.reference_points()?;
    // Distinct (curve, x, method) evaluations; markers often share x with the curve.
    let mut jobs: Vec<(&str, u64, Mode)> = Vec::new();
    let mut job_of = Vec::with_capacity(points.len());
    for p in &points {
        let metric = fig.curve(&p.curve)?.metric;
        let key = (p.curve.as_str(), p.x.to_bits(), method_for(p, metric, opts.mode));
        let index = jobs.iter().position(|j| *j == key).unwrap_or_else(|| {
            jobs.push(key);
            jobs.len() - 1
        });
        job_of.push(index);
    }
    let run = |&(name, x, method): &(&str, u64, Mode)| -> Result<f64, CliError> {
        let curve = fig.curve(name)?;
        let cfg = fig.scenario(base, curve, f64::from_bits(x))?;
        match method {
            Mode::Simulate => Ok(curve.metric.simulated(&simulate_config(&cfg, opts)?)),
            _ => {
                let engine = Analysis::with_options(&cfg.to_params()?, opts.analytic_options())?;
                curve.metric.analytic(&engine)
            }
        }
    };
    let mut values = vec![f64::NAN; jobs.len()];
    let pool = opts.pool()?;
    let analytic: Vec<usize> = (0..jobs.len()).filter(|&i| jobs[i].2 == Mode::Analytic).collect();
    let computed: Vec<f64> = pool.install(|| analytic.par_iter().map(|&i| run(&jobs[i])).collect::<Result<_, _>>())?;
    for (&i, v) in analytic.iter().zip(computed) {
        values[i] = v;
    }
    // Each simulation spreads its trials over the whole pool.
    for (i, job) in jobs.iter().enumerate() {
        if job.2 == Mode::Simulate {
            values[i] = run(job)?;
        }
    }

    let rows: Vec<ComparisonRow> = points
        .iter()
        .zip(&job_of)
        .map(|(p, &j)| ComparisonRow {
            figure: fig.id.to_string(),
            curve: p.curve.clone(),
            kind: p.kind,
            x: p.x,
            reference: p.reference,
            computed: values[j],
            abs_dev: (values[j] - p.reference).abs(),
            method: jobs[j].2,
        })
        .collect();
    Ok((rows.clone(), summarize(&rows)))
}

/// Per (curve, kind) maximum deviation, in order of first appearance.
pub fn summarize(rows: &[ComparisonRow]) -> Vec<CurveDeviation> {
    let mut out: Vec<CurveDeviation> = Vec::new();
    for r in rows {
        let slot = match out.iter_mut().find(|d| d.curve == r.curve && d.kind == r.kind) {
            Some(d) => d,
            None => {
                out.push(CurveDeviation {
                    figure: r.figure.clone(),
                    curve: r.curve.clone(),
                    kind: r.kind,
                    points: 0,
                    max_abs_dev: f64::NEG_INFINITY,
                    at_x: f64::NAN,
                });
                out.last_mut().expect("just pushed")
            }
        };
        slot.points += 1;
        if r.abs_dev > slot.max_abs_dev || r.abs_dev.is_nan() {
            slot.max_abs_dev = r.abs_dev;
            slot.at_x = r.x;
        }
    }
    out
}

pub fn write_comparison<W: std::io::Write>(out: W, rows: &[ComparisonRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["figure", "curve", "kind", "x", "reference", "computed", "abs_dev", "method"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
