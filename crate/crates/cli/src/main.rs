use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use skyhaul::Scheme;
use skyhaul_cli::config::{self, ScenarioConfig};
use skyhaul_cli::figures::{self, CurveDeviation, FIGURES};
use skyhaul_cli::manifest::{manifest_path, RunManifest};
use skyhaul_cli::run::{self, default_workers, Mode, RunOptions};
use skyhaul_cli::validate::{self, Status, DEFAULT_SLACK};
use skyhaul_cli::CliError;

#[derive(Parser)]
#[command(name = "skyhaul", version, about = "Coverage of UAV-assisted cellular networks with mmWave backhaul")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scenario.
    Eval(Common),
    /// Evaluate a scenario over a list of values of one key.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Config key to vary (`sigma` sets both steering-error deviations).
        #[arg(long)]
        var: Option<String>,
        /// Comma-separated values, e.g. `30,50,70`.
        #[arg(long, conflicts_with = "range", allow_hyphen_values = true)]
        values: Option<String>,
        /// Inclusive grid `start:stop:step`.
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
    },
    /// Run a bundled figure recipe against its reference points.
    Reproduce {
        #[command(flatten)]
        common: Common,
        /// Figure id; see `--list`.
        figure: Option<String>,
        /// List the bundled figures.
        #[arg(long)]
        list: bool,
    },
    /// Check analytic values against simulation confidence intervals.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Tolerance added to both ends of each 95% interval.
        #[arg(long, default_value_t = DEFAULT_SLACK)]
        slack: f64,
        /// Setting applied to the analytic side only (negative controls).
        #[arg(long = "analytic-set", value_name = "KEY=VALUE")]
        analytic_set: Vec<String>,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file or run manifest; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// unaware, aware or instantaneous.
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<Scheme>,
    /// Override one config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", allow_hyphen_values = true)]
    set: Vec<String>,
    /// Monte-Carlo trials per simulated point.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV; stdout when omitted. The manifest goes next to it, or to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Integrate UAV tail masses directly instead of interpolating a table.
    #[arg(long)]
    no_cache: bool,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse::<Scheme>().map_err(|e| e.to_string())
}

fn split_assignment(s: &str) -> Result<(&str, &str), CliError> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| CliError::Config(format!("`{s}` is not KEY=VALUE")))
}

fn apply_overrides(mut cfg: ScenarioConfig, sets: &[String]) -> Result<ScenarioConfig, CliError> {
    for s in sets {
        let (k, v) = split_assignment(s)?;
        cfg = cfg.with_override(k, v)?;
    }
    Ok(cfg)
}

/// Resolved inputs of a run.
struct Setup {
    cfg: ScenarioConfig,
    opts: RunOptions,
    /// Manifest the config was read from, when rerunning.
    previous: Option<RunManifest>,
}

impl Common {
    fn resolve(&self) -> Result<Setup, CliError> {
        let (cfg, previous) = match &self.config {
            None => (ScenarioConfig::default(), None),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
                match RunManifest::parse(&text)? {
                    Some(m) => (m.config.clone(), Some(m)),
                    None => (config::load(path)?, None),
                }
            }
        };
        let cfg = apply_overrides(cfg, &self.set)?;
        let base = match &previous {
            Some(m) => RunOptions {
                mode: m.mode,
                scheme: m.scheme,
                trials: m.trials,
                seed: m.seed,
                workers: default_workers(),
                use_cache: m.use_cache,
            },
            None => RunOptions::default(),
        };
        if self.workers == Some(0) {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        let opts = RunOptions {
            mode: self.mode.unwrap_or(base.mode),
            scheme: self.scheme.unwrap_or(base.scheme),
            trials: self.trials.unwrap_or(base.trials),
            seed: self.seed.unwrap_or(base.seed),
            workers: self.workers.unwrap_or(base.workers),
            use_cache: base.use_cache && !self.no_cache,
        };
        Ok(Setup { cfg, opts, previous })
    }

    fn manifest(&self, command: &str, setup: &Setup, started: Instant) -> RunManifest {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            mode: setup.opts.mode,
            scheme: setup.opts.scheme,
            seed: setup.opts.seed,
            trials: setup.opts.trials,
            workers: setup.opts.workers,
            use_cache: setup.opts.use_cache,
            sweep_var: None,
            sweep_values: None,
            figure: None,
            overrides: self.set.clone(),
            analytic_overrides: Vec::new(),
            slack: None,
            wall_time_s: started.elapsed().as_secs_f64(),
            warnings: Vec::new(),
            deviations: Vec::new(),
            config: setup.cfg.clone(),
        }
    }

    /// Writes the output through `emit`, then the manifest.
    fn finish<F>(&self, manifest: &RunManifest, emit: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
    {
        match &self.out {
            Some(path) => {
                let mut file = std::fs::File::create(path)
                    .map_err(|e| CliError::Output(format!("cannot create {}: {e}", path.display())))?;
                emit(&mut file)?;
                manifest.write(&manifest_path(path))?;
            }
            None => {
                let stdout = std::io::stdout();
                emit(&mut stdout.lock())?;
                eprintln!("# run manifest\n{}", manifest.to_toml_string()?);
            }
        }
        Ok(())
    }
}

fn report_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn cmd_eval(common: &Common) -> Result<(), CliError> {
    let started = Instant::now();
    let setup = common.resolve()?;
    let (rows, warnings) = run::eval(&setup.cfg, &setup.opts)?;
    report_warnings(&warnings);
    let mut m = common.manifest("eval", &setup, started);
    m.warnings = warnings;
    common.finish(&m, |w| run::write_rows(w, &rows))
}

fn cmd_sweep(common: &Common, var: Option<&str>, values: Option<&str>, range: Option<&str>) -> Result<(), CliError> {
    let started = Instant::now();
    let setup = common.resolve()?;
    let previous = setup.previous.as_ref();
    let var = var
        .map(str::to_string)
        .or_else(|| previous.and_then(|m| m.sweep_var.clone()))
        .ok_or_else(|| CliError::Config("sweep needs --var".into()))?;
    let values = match (values, range) {
        (Some(v), _) => run::parse_values(v)?,
        (None, Some(r)) => run::parse_range(r)?,
        (None, None) => previous
            .and_then(|m| m.sweep_values.clone())
            .ok_or_else(|| CliError::Config("sweep needs --values or --range".into()))?,
    };
    let (rows, warnings) = run::sweep(&setup.cfg, &var, &values, &setup.opts)?;
    report_warnings(&warnings);
    let mut m = common.manifest("sweep", &setup, started);
    m.sweep_var = Some(var);
    m.sweep_values = Some(values);
    m.warnings = warnings;
    common.finish(&m, |w| run::write_rows(w, &rows))
}

fn print_deviations(devs: &[CurveDeviation]) {
    eprintln!("{:<28} {:<10} {:>6} {:>12} {:>10}", "curve", "kind", "points", "max |dev|", "at x");
    for d in devs {
        eprintln!(
            "{:<28} {:<10} {:>6} {:>12.5} {:>10}",
            d.curve,
            format!("{:?}", d.kind).to_lowercase(),
            d.points,
            d.max_abs_dev,
            d.at_x
        );
    }
}

fn cmd_reproduce(common: &Common, figure: Option<&str>, list: bool) -> Result<(), CliError> {
    if list {
        for f in FIGURES {
            println!("{:<26} {}", f.id, f.title);
        }
        return Ok(());
    }
    let started = Instant::now();
    let setup = common.resolve()?;
    let id = figure
        .map(str::to_string)
        .or_else(|| setup.previous.as_ref().and_then(|m| m.figure.clone()))
        .ok_or_else(|| CliError::Config("reproduce needs a figure id; see --list".into()))?;
    let fig = figures::figure(&id)?;
    let (rows, devs) = figures::reproduce(fig, &setup.cfg, &setup.opts)?;
    print_deviations(&devs);
    let mut m = common.manifest("reproduce", &setup, started);
    m.figure = Some(id);
    m.deviations = devs;
    common.finish(&m, |w| figures::write_comparison(w, &rows))
}

fn cmd_validate(common: &Common, slack: f64, analytic_set: &[String]) -> Result<(), CliError> {
    if !(slack >= 0.0 && slack.is_finite()) {
        return Err(CliError::Config(format!("--slack must be nonnegative, got {slack}")));
    }
    let started = Instant::now();
    let setup = common.resolve()?;
    let analytic_cfg = apply_overrides(setup.cfg.clone(), analytic_set)?;
    let report = validate::validate(&setup.cfg, &analytic_cfg, &setup.opts, slack)?;
    for c in &report.checks {
        let fmt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.5}"));
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NotApplicable => "N/A",
        };
        eprintln!(
            "{status:<4} {:<18} analytic {:>9} simulated {:>9} CI [{}, {}]",
            c.metric,
            fmt(c.analytic),
            fmt(c.simulated),
            fmt(c.ci_low),
            fmt(c.ci_high)
        );
    }
    let mut m = common.manifest("validate", &setup, started);
    m.analytic_overrides = analytic_set.to_vec();
    m.slack = Some(slack);
    common.finish(&m, |w| validate::write_checks(w, &report.checks))?;
    if report.passed() {
        eprintln!("validation PASS");
        Ok(())
    } else {
        Err(CliError::ValidationFailed(format!(
            "outside tolerance: {}",
            report.failures().join(", ")
        )))
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Eval(common) => cmd_eval(common),
        Command::Sweep {
            common,
            var,
            values,
            range,
        } => cmd_sweep(common, var.as_deref(), values.as_deref(), range.as_deref()),
        Command::Reproduce { common, figure, list } => cmd_reproduce(common, figure.as_deref(), *list),
        Command::Validate {
            common,
            slack,
            analytic_set,
        } => cmd_validate(common, *slack, analytic_set),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
