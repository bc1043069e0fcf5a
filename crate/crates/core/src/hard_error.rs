//! Hard read errors: drive uncorrectable errors and tape damage, and the
//! probability that a node-failure transition survives them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{binomial_tail, choose, incomplete_beta_unchecked};

/// Whether the uncorrectable error rate is quoted per bit or per byte read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UcerUnit {
    #[default]
    Bit,
    Byte,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardErrorParams {
    ucer: f64,
    capacity_reads: f64,
    kappa: f64,
    epsilon: f64,
    eta: f64,
}

impl HardErrorParams {
    /// `capacity_bytes` is converted to bits when the UCER is per bit.
    pub fn new(ucer: f64, capacity_bytes: f64, unit: UcerUnit, kappa: f64) -> Result<Self> {
        if !(capacity_bytes > 0.0 && capacity_bytes.is_finite()) {
            return Err(Error::invalid("capacity_bytes", format!("must be positive, got {capacity_bytes}")));
        }
        if !(0.0..1.0).contains(&kappa) {
            return Err(Error::invalid("kappa", format!("must lie in [0, 1), got {kappa}")));
        }
        let capacity_reads = match unit {
            UcerUnit::Bit => capacity_bytes * 8.0,
            UcerUnit::Byte => capacity_bytes,
        };
        let epsilon = epsilon_from_ucer(ucer, capacity_reads)?;
        let eta = combined_rate(epsilon, kappa);
        Ok(HardErrorParams {
            ucer,
            capacity_reads,
            kappa,
            epsilon,
            eta,
        })
    }

    pub fn ucer(&self) -> f64 {
        self.ucer
    }

    /// Capacity in the unit the UCER is quoted in.
    pub fn capacity_reads(&self) -> f64 {
        self.capacity_reads
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Probability of at least one uncorrectable error over a full-tape read.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Combined hard error rate `1 - (1 - ε)(1 - κ)`.
    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// `1 - (1 - ucer)^capacity`, evaluated as `-expm1(capacity · log1p(-ucer))`.
pub fn epsilon_from_ucer(ucer: f64, capacity: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&ucer) {
        return Err(Error::invalid("ucer", format!("must lie in [0, 1), got {ucer}")));
    }
    if !(capacity > 0.0) {
        return Err(Error::invalid("capacity", format!("must be positive, got {capacity}")));
    }
    Ok(-(capacity * (-ucer).ln_1p()).exp_m1())
}

pub fn combined_rate(epsilon: f64, kappa: f64) -> f64 {
    1.0 - (1.0 - epsilon) * (1.0 - kappa)
}

/// Probability that a failure out of `i` available nodes leaves data
/// recoverable: at most `i - k - 1` of the `i` concurrent reads hit a hard
/// error. Zero at `i = k`.
pub fn delta(i: usize, k: usize, eta: f64) -> Result<f64> {
    validate_delta(i, k, eta)?;
    Ok(delta_unchecked(i, k, eta))
}

/// Same quantity by the incomplete-beta route `1 - I_η(i-k, k+1)`.
pub fn delta_via_beta(i: usize, k: usize, eta: f64) -> Result<f64> {
    validate_delta(i, k, eta)?;
    if i == k {
        return Ok(0.0);
    }
    Ok(1.0 - incomplete_beta_unchecked(eta, (i - k) as f64, (k + 1) as f64))
}

fn validate_delta(i: usize, k: usize, eta: f64) -> Result<()> {
    if i < k {
        return Err(Error::invalid("i", format!("{i} available nodes is below k = {k}")));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::invalid("eta", format!("must lie in [0, 1], got {eta}")));
    }
    Ok(())
}

pub(crate) fn delta_unchecked(i: usize, k: usize, eta: f64) -> f64 {
    let tolerated = i - k;
    if tolerated == 0 {
        return 0.0;
    }
    if eta == 0.0 {
        return 1.0;
    }
    if i <= 60 {
        let q = 1.0 - eta;
        let mut sum = 0.0;
        for l in 0..tolerated {
            sum += choose(i as u64, l as u64) * eta.powi(l as i32) * q.powi((i - l) as i32);
        }
        sum.min(1.0)
    } else {
        1.0 - binomial_tail(i as u64, tolerated as u64, eta)
    }
}
