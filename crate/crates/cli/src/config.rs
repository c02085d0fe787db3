//! Flat scenario files and their mapping onto [`NetworkParams`].
//!
//! Every key is required. Thresholds, intercepts and antenna gains are given
//! in dB (`_db` suffix); everything else is linear SI, except the two beam
//! widths which are in degrees (`_deg`).

use std::path::Path;

use serde::{Deserialize, Serialize};
use skyhaul::analytic::{db_to_linear, linear_to_db, NetworkParams};
use skyhaul::channel::{AccessLosParams, AntennaPattern, BackhaulLosParams, FadingParams};
use skyhaul::geometry::DeploymentGeometry;
use toml::{Table, Value};

use crate::error::CliError;

/// One scenario as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// BS density (BS/m²).
    pub lambda_g: f64,
    pub h_g: f64,
    pub delta_b: f64,
    pub n_u: usize,
    pub h_u: f64,
    pub r_u: f64,
    pub v_0: f64,
    pub sim_radius: f64,
    pub p_g: f64,
    pub p_b: f64,
    pub p_u: f64,
    pub eta_g: f64,
    pub eta_l: f64,
    pub eta_n: f64,
    pub c_l_db: f64,
    pub c_n_db: f64,
    pub m_l: u32,
    pub m_n: u32,
    pub los_a: f64,
    pub los_b: f64,
    pub bh_c: f64,
    pub bh_d: f64,
    pub bh_e: f64,
    pub bs_g_max_db: f64,
    pub bs_g_min_db: f64,
    pub bs_theta_deg: f64,
    pub uav_g_max_db: f64,
    pub uav_g_min_db: f64,
    pub uav_theta_deg: f64,
    /// Beam-steering error standard deviations (rad).
    pub sigma_g: f64,
    pub sigma_u: f64,
    pub noise_w: f64,
    pub tau_a_db: f64,
    pub tau_b_db: f64,
}

/// Keys holding integers; all others are floats.
const INTEGER_KEYS: [&str; 3] = ["n_u", "m_l", "m_n"];

/// Pseudo-key setting both steering-error deviations at once.
pub const SIGMA_ALIAS: &str = "sigma";

/// Every config key, sorted.
pub fn keys() -> Vec<String> {
    match Value::try_from(ScenarioConfig::default()) {
        Ok(Value::Table(t)) => t.keys().cloned().collect(),
        _ => unreachable!("a config serializes to a table"),
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::from_params(&NetworkParams::default())
    }
}

impl ScenarioConfig {
    pub fn from_params(p: &NetworkParams) -> Self {
        let g = &p.geometry;
        Self {
            lambda_g: g.lambda_g,
            h_g: g.h_g,
            delta_b: g.delta_b,
            n_u: g.n_u,
            h_u: g.h_u,
            r_u: g.r_u,
            v_0: g.v_0,
            sim_radius: g.sim_radius,
            p_g: p.p_g,
            p_b: p.p_b,
            p_u: p.p_u,
            eta_g: p.eta_g,
            eta_l: p.eta_l,
            eta_n: p.eta_n,
            c_l_db: round_db(linear_to_db(p.c_l)),
            c_n_db: round_db(linear_to_db(p.c_n)),
            m_l: p.fading.m_l,
            m_n: p.fading.m_n,
            los_a: p.access_los.a,
            los_b: p.access_los.b,
            bh_c: p.backhaul_los.c,
            bh_d: p.backhaul_los.d,
            bh_e: p.backhaul_los.e,
            bs_g_max_db: round_db(linear_to_db(p.bs_antenna.g_max)),
            bs_g_min_db: round_db(linear_to_db(p.bs_antenna.g_min)),
            bs_theta_deg: round_db(p.bs_antenna.theta.to_degrees()),
            uav_g_max_db: round_db(linear_to_db(p.uav_antenna.g_max)),
            uav_g_min_db: round_db(linear_to_db(p.uav_antenna.g_min)),
            uav_theta_deg: round_db(p.uav_antenna.theta.to_degrees()),
            sigma_g: p.sigma_g,
            sigma_u: p.sigma_u,
            noise_w: p.noise,
            tau_a_db: round_db(linear_to_db(p.tau_a)),
            tau_b_db: round_db(linear_to_db(p.tau_b)),
        }
    }

    /// Linear-unit parameters; fails on any violated invariant.
    pub fn to_params(&self) -> Result<NetworkParams, CliError> {
        let p = NetworkParams {
            geometry: DeploymentGeometry {
                lambda_g: self.lambda_g,
                h_g: self.h_g,
                delta_b: self.delta_b,
                n_u: self.n_u,
                h_u: self.h_u,
                r_u: self.r_u,
                v_0: self.v_0,
                sim_radius: self.sim_radius,
            },
            p_g: self.p_g,
            p_b: self.p_b,
            p_u: self.p_u,
            eta_g: self.eta_g,
            eta_l: self.eta_l,
            eta_n: self.eta_n,
            c_l: db_to_linear(self.c_l_db),
            c_n: db_to_linear(self.c_n_db),
            fading: FadingParams {
                m_l: self.m_l,
                m_n: self.m_n,
            },
            access_los: AccessLosParams {
                a: self.los_a,
                b: self.los_b,
            },
            backhaul_los: BackhaulLosParams {
                c: self.bh_c,
                d: self.bh_d,
                e: self.bh_e,
            },
            bs_antenna: AntennaPattern {
                g_max: db_to_linear(self.bs_g_max_db),
                g_min: db_to_linear(self.bs_g_min_db),
                theta: self.bs_theta_deg.to_radians(),
            },
            uav_antenna: AntennaPattern {
                g_max: db_to_linear(self.uav_g_max_db),
                g_min: db_to_linear(self.uav_g_min_db),
                theta: self.uav_theta_deg.to_radians(),
            },
            sigma_g: self.sigma_g,
            sigma_u: self.sigma_u,
            noise: self.noise_w,
            tau_a: db_to_linear(self.tau_a_db),
            tau_b: db_to_linear(self.tau_b_db),
        };
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(p)
    }

    /// Parses a config, or the `config` table of a run manifest.
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        Self::from_table(scenario_table(parse_table(text)?)?)
    }

    pub fn from_table(mut table: Table) -> Result<Self, CliError> {
        normalize(&mut table)?;
        Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("a config always serializes")
    }

    /// Copy with `key = value` applied; `value` is written as in a config file.
    pub fn with_override(&self, key: &str, value: &str) -> Result<Self, CliError> {
        let mut table = self.to_table();
        set_key(&mut table, key, parse_value(key, value)?)?;
        Self::from_table(table)
    }

    /// Copy with a numeric `key` set; integer keys need integral values.
    pub fn with_number(&self, key: &str, value: f64) -> Result<Self, CliError> {
        let mut table = self.to_table();
        set_key(&mut table, key, Value::Float(value))?;
        Self::from_table(table)
    }

    fn to_table(&self) -> Table {
        match Value::try_from(self) {
            Ok(Value::Table(t)) => t,
            _ => unreachable!("a config serializes to a table"),
        }
    }
}

/// Rounds to 1e-9 so that `10^1.8` converts back to `18` rather than `18.000000000000004`.
fn round_db(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

pub(crate) fn parse_table(text: &str) -> Result<Table, CliError> {
    text.parse::<Table>()
        .map_err(|e| CliError::Config(format!("malformed config: {}", e.message())))
}

/// A manifest keeps the scenario in its `config` table; a plain config is the scenario.
pub(crate) fn scenario_table(mut table: Table) -> Result<Table, CliError> {
    match table.remove("config") {
        Some(Value::Table(t)) => Ok(t),
        Some(_) => Err(CliError::Config("`config` must be a table".into())),
        None => Ok(table),
    }
}

fn parse_value(key: &str, value: &str) -> Result<Value, CliError> {
    let doc = format!("v = {value}");
    let mut t = doc
        .parse::<Table>()
        .map_err(|_| CliError::Config(format!("cannot parse value `{value}` for key `{key}`")))?;
    Ok(t.remove("v").expect("the key was just written"))
}

fn set_key(table: &mut Table, key: &str, value: Value) -> Result<(), CliError> {
    if key == SIGMA_ALIAS {
        table.insert("sigma_g".into(), value.clone());
        table.insert("sigma_u".into(), value);
        return Ok(());
    }
    if !table.contains_key(key) {
        return Err(CliError::Config(format!("unknown key `{key}`")));
    }
    table.insert(key.into(), value);
    Ok(())
}

/// Coerces numbers to the type of their key so `h_u = 100` and `n_u = 10.0` both load.
fn normalize(table: &mut Table) -> Result<(), CliError> {
    for (key, value) in table.iter_mut() {
        let integer = INTEGER_KEYS.contains(&key.as_str());
        match (*value).clone() {
            Value::Integer(i) if !integer => *value = Value::Float(i as f64),
            Value::Float(f) if integer => {
                if f.fract() != 0.0 || !f.is_finite() || f < 0.0 {
                    return Err(CliError::Config(format!("key `{key}` needs a nonnegative integer, got {f}")));
                }
                *value = Value::Integer(f as i64);
            }
            Value::Integer(i) if integer && i < 0 => {
                return Err(CliError::Config(format!("key `{key}` needs a nonnegative integer, got {i}")));
            }
            _ => {}
        }
    }
    Ok(())
}

pub fn load(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    ScenarioConfig::from_toml_str(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
