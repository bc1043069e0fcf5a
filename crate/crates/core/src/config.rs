//! Flat TOML run configuration.
//!
//! Units live in the key names: rates are per hour, the exchange rate is in
//! exchanges per hour. Every key except `n` and `k` has a default, and
//! unknown keys are rejected.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::carrier::{RateParams, WeibullParams};
use crate::error::Error;
use crate::hard_error::{HardErrorParams, UcerUnit};
use crate::sim::{SimConfig, SimMode, SweepAxis, DEFAULT_HORIZON_HOURS};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.key, self.line) {
            (Some(key), Some(line)) => write!(f, "line {line}, key `{key}`: {}", self.message),
            (Some(key), None) => write!(f, "key `{key}`: {}", self.message),
            (None, Some(line)) => write!(f, "line {line}: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub lambda_per_hour: f64,
    pub mu_per_hour: f64,
    pub theta_per_hour: f64,
    pub phi_per_hour: f64,
    pub omega_xph: f64,
    pub ucer: f64,
    pub ucer_unit: UcerUnit,
    pub capacity_bytes: f64,
    pub kappa: f64,
    pub weibull_shape: f64,
    pub weibull_scale_exchanges: f64,
    pub mode: SimMode,
    pub trials: usize,
    pub max_sim_hours: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary_output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials_csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_axis: Option<SweepAxis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_grid: Option<Vec<f64>>,
}

impl Default for ConfigFile {
    fn default() -> Self {
        ConfigFile {
            n: None,
            k: None,
            lambda_per_hour: 1.0 / 50_000.0,
            mu_per_hour: 1.0 / 24.0,
            theta_per_hour: 1.0 / 8760.0,
            phi_per_hour: 1.0 / 48.0,
            omega_xph: 10.0,
            ucer: 1e-19,
            ucer_unit: UcerUnit::Bit,
            capacity_bytes: 6e12,
            kappa: 0.001,
            weibull_shape: 0.67,
            weibull_scale_exchanges: 525_985.0,
            mode: SimMode::Exact,
            trials: 10_000,
            max_sim_hours: DEFAULT_HORIZON_HOURS,
            seed: 0,
            summary_output: None,
            trials_csv: None,
            sweep_output: None,
            sweep_axis: None,
            sweep_grid: None,
        }
    }
}

impl ConfigFile {
    /// Parses and validates a configuration document.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of(text, s.start));
            let key = line.and_then(|l| key_on_line(text, l));
            ConfigError {
                key,
                line,
                message: e.message().to_string(),
            }
        })?;
        file.sim_config().map_err(|e| file.locate(text, e))?;
        Ok(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            key: None,
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    pub fn sim_config(&self) -> Result<SimConfig, ConfigError> {
        let n = self.n.ok_or_else(|| missing("n"))?;
        let k = self.k.ok_or_else(|| missing("k"))?;
        let cfg = self.build(n, k).map_err(|e| match e {
            Error::InvalidParameter { name, reason } => ConfigError {
                key: Some(key_for(name).to_string()),
                line: None,
                message: reason,
            },
            other => ConfigError {
                key: None,
                line: None,
                message: other.to_string(),
            },
        })?;
        if let Some(grid) = &self.sweep_grid {
            if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(ConfigError {
                    key: Some("sweep_grid".into()),
                    line: None,
                    message: "must be nonempty and strictly increasing".into(),
                });
            }
        }
        Ok(cfg)
    }

    fn build(&self, n: usize, k: usize) -> crate::Result<SimConfig> {
        let cfg = SimConfig {
            n,
            k,
            rates: RateParams {
                lambda: self.lambda_per_hour,
                mu: self.mu_per_hour,
                theta: self.theta_per_hour,
                phi: self.phi_per_hour,
                omega: self.omega_xph,
            },
            hard_error: HardErrorParams::new(self.ucer, self.capacity_bytes, self.ucer_unit, self.kappa)?,
            weibull: WeibullParams::new(self.weibull_shape, self.weibull_scale_exchanges)?,
            mode: self.mode,
            trials: self.trials,
            max_sim_hours: self.max_sim_hours,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn locate(&self, text: &str, mut err: ConfigError) -> ConfigError {
        if let Some(key) = &err.key {
            err.line = text.lines().position(|l| key_of(l) == Some(key.as_str())).map(|p| p + 1);
        }
        err
    }
}

/// Reads, validates and converts a configuration file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<SimConfig, ConfigError> {
    ConfigFile::load(path)?.sim_config()
}

fn missing(key: &str) -> ConfigError {
    ConfigError {
        key: Some(key.to_string()),
        line: None,
        message: "required key is missing".into(),
    }
}

fn key_for(name: &str) -> &str {
    match name {
        "lambda" => "lambda_per_hour",
        "mu" => "mu_per_hour",
        "theta" => "theta_per_hour",
        "phi" => "phi_per_hour",
        "omega" => "omega_xph",
        "capacity" => "capacity_bytes",
        "weibull_scale" => "weibull_scale_exchanges",
        other => other,
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn key_of(line: &str) -> Option<&str> {
    let (lhs, _) = line.split_once('=')?;
    let key = lhs.trim().trim_matches('"');
    (!key.is_empty() && !key.starts_with('#')).then_some(key)
}

fn key_on_line(text: &str, line: usize) -> Option<String> {
    text.lines().nth(line - 1).and_then(key_of).map(str::to_string)
}
