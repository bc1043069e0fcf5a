//! Monte Carlo estimation of time to data loss and time to first data
//! unavailability with aging carriers.
//!
//! Two trial kernels share the same node/carrier bookkeeping:
//!
//! * [`SimMode::Exact`] simulates every mechanism directly: Gamma carrier
//!   lifetimes, detection gated on the failed node's own carrier, rebuilds
//!   that wait for all selected helper carriers and then for the writer's.
//! * [`SimMode::Approx`] keeps the carrier up/down process but replaces the
//!   gated detection and rebuild stages with the carrier-aware exponential
//!   rates, frozen between events.
//!
//! Trials draw from independent ChaCha streams keyed by `(seed, trial)`, so
//! batch output does not depend on how trials are spread over workers.

mod approx;
mod fleet;
mod exact;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carrier::{RateParams, WeibullParams};
use crate::error::{ensure_positive, Error, Result};
use crate::hard_error::HardErrorParams;

pub use approx::run_trial_approx;
pub use exact::run_trial_exact;

/// Default truncation horizon, hours.
pub const DEFAULT_HORIZON_HOURS: f64 = 1e9;

/// Censoring above this fraction is logged as a warning.
pub const CENSORING_WARN_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    #[default]
    Exact,
    Approx,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub k: usize,
    pub rates: RateParams,
    pub hard_error: HardErrorParams,
    pub weibull: WeibullParams,
    pub mode: SimMode,
    pub trials: usize,
    pub max_sim_hours: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::invalid("k", "must be at least 1"));
        }
        if self.k > self.n {
            return Err(Error::invalid("k", format!("k = {} exceeds n = {}", self.k, self.n)));
        }
        if self.trials < 1 {
            return Err(Error::invalid("trials", "need at least one trial"));
        }
        ensure_positive("max_sim_hours", self.max_sim_hours)?;
        self.rates.validate()
    }
}

/// First-passage time, or the horizon if the event was not observed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstPassage {
    pub hours: f64,
    pub censored: bool,
}

impl FirstPassage {
    pub fn observed(hours: f64) -> Self {
        FirstPassage {
            hours,
            censored: false,
        }
    }

    pub fn censored_at(horizon: f64) -> Self {
        FirstPassage {
            hours: horizon,
            censored: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub time_to_data_loss: FirstPassage,
    pub time_to_first_unavailability: FirstPassage,
    pub total_exchanges: u64,
    pub carrier_failures: u64,
    pub node_failures: u64,
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_samples(samples: impl Iterator<Item = f64> + Clone) -> Self {
        let (count, sum) = samples.clone().fold((0usize, 0.0), |(c, s), v| (c + 1, s + v));
        if count == 0 {
            return Estimate {
                mean: f64::NAN,
                stderr: f64::NAN,
            };
        }
        let mean = sum / count as f64;
        if count == 1 {
            return Estimate { mean, stderr: 0.0 };
        }
        let ss: f64 = samples.map(|v| (v - mean) * (v - mean)).sum();
        let sd = (ss / (count - 1) as f64).sqrt();
        Estimate {
            mean,
            stderr: sd / (count as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub trials: usize,
    pub mttdl: Estimate,
    pub mttdu: Estimate,
    /// Fraction of trials whose data-loss time was cut at the horizon.
    pub censored_fraction: f64,
    /// Fraction of trials that never became unavailable before the horizon.
    pub unavailability_censored_fraction: f64,
    /// Set when more than half the trials were censored; the means are then
    /// dominated by the horizon.
    pub unreliable: bool,
    #[serde(skip)]
    pub outcomes: Vec<TrialOutcome>,
}

impl SimSummary {
    pub fn from_outcomes(outcomes: Vec<TrialOutcome>) -> Self {
        let trials = outcomes.len();
        let mttdl = Estimate::from_samples(outcomes.iter().map(|o| o.time_to_data_loss.hours));
        let mttdu = Estimate::from_samples(outcomes.iter().map(|o| o.time_to_first_unavailability.hours));
        let frac = |pred: fn(&TrialOutcome) -> bool| {
            outcomes.iter().filter(|o| pred(o)).count() as f64 / trials.max(1) as f64
        };
        let censored_fraction = frac(|o| o.time_to_data_loss.censored);
        let unavailability_censored_fraction = frac(|o| o.time_to_first_unavailability.censored);
        SimSummary {
            trials,
            mttdl,
            mttdu,
            censored_fraction,
            unavailability_censored_fraction,
            unreliable: censored_fraction > 0.5,
            outcomes,
        }
    }
}

/// Random stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn run_trial(config: &SimConfig, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    match config.mode {
        SimMode::Exact => run_trial_exact(config, rng),
        SimMode::Approx => run_trial_approx(config, rng),
    }
}

/// Runs `config.trials` independent trials on the global rayon pool.
pub fn run_batch(config: &SimConfig) -> Result<SimSummary> {
    config.validate()?;
    let outcomes = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(config, &mut trial_rng(config.seed, t)))
        .collect::<Result<Vec<_>>>()?;
    let summary = SimSummary::from_outcomes(outcomes);
    if summary.censored_fraction > CENSORING_WARN_FRACTION {
        log::warn!(
            "{:.1}% of trials hit the {} h horizon before data loss",
            100.0 * summary.censored_fraction,
            config.max_sim_hours
        );
    }
    Ok(summary)
}

/// [`run_batch`] on a dedicated pool of `workers` threads.
pub fn run_batch_with_workers(config: &SimConfig, workers: usize) -> Result<SimSummary> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    pool.install(|| run_batch(config))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    ExchangeRate,
    CarrierRepairRate,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::ExchangeRate => "exchange_rate",
            SweepAxis::CarrierRepairRate => "carrier_repair_rate",
        }
    }

    pub fn apply(&self, config: &SimConfig, value: f64) -> SimConfig {
        let mut out = config.clone();
        match self {
            SweepAxis::ExchangeRate => out.rates.omega = value,
            SweepAxis::CarrierRepairRate => out.rates.phi = value,
        }
        out
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exchange_rate" => Ok(SweepAxis::ExchangeRate),
            "carrier_repair_rate" => Ok(SweepAxis::CarrierRepairRate),
            other => Err(Error::invalid("axis", format!("unknown sweep axis `{other}`"))),
        }
    }
}

/// One batch per grid value, in grid order. Every batch reuses the same
/// seed, so neighbouring points share random streams.
pub fn sweep(config: &SimConfig, axis: SweepAxis, grid: &[f64]) -> Result<Vec<(f64, SimSummary)>> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "sweep grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("grid", "sweep grid must be strictly increasing"));
    }
    grid.iter()
        .map(|&v| run_batch(&axis.apply(config, v)).map(|s| (v, s)))
        .collect()
}
