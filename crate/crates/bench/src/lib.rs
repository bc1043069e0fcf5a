//! Shared fixtures for the criterion benchmarks.

use coldsim_core::sim::DEFAULT_HORIZON_HOURS;
use coldsim_core::{HardErrorParams, RateParams, SimConfig, SimMode, UcerUnit, WeibullParams};

pub fn table_rates() -> RateParams {
    RateParams {
        lambda: 1.0 / 50_000.0,
        mu: 1.0 / 24.0,
        theta: 1.0 / 8760.0,
        phi: 1.0 / 48.0,
        omega: 10.0,
    }
}

pub fn table_eta() -> f64 {
    HardErrorParams::new(1e-19, 6e12, UcerUnit::Bit, 0.001).unwrap().eta()
}

pub fn sim_config(n: usize, k: usize, mode: SimMode, omega: f64) -> SimConfig {
    SimConfig {
        n,
        k,
        rates: RateParams { omega, ..table_rates() },
        hard_error: HardErrorParams::new(1e-19, 6e12, UcerUnit::Bit, 0.001).unwrap(),
        weibull: WeibullParams::new(0.67, 525_985.0).unwrap(),
        mode,
        trials: 1,
        max_sim_hours: DEFAULT_HORIZON_HOURS,
        seed: 1,
    }
}

/// Survival profile with a few carriers partly worn out.
pub fn survivals(len: usize) -> Vec<f64> {
    (0..len).map(|s| 1.0 - 0.07 * (s % 5) as f64).collect()
}
