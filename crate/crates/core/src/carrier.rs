//! Carrier (robot) lifetimes and the carrier-aware detection/repair rates.
//!
//! A carrier survives a Weibull-distributed number of exchanges (its SBF
//! budget). Exchanges arrive as a Poisson process, so for a given budget the
//! time to failure is Gamma distributed. Detection and repair of failed nodes
//! need carriers, which makes their effective rates depend on the carrier
//! survival probabilities of the nodes involved.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::special::{choose, gamma, harmonic, pmf_convolution, regularized_gamma_q, ProbVector};

/// Regression diagnostics attached to fitted parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
    pub n_samples: usize,
}

/// Weibull distribution of exchanges-before-failure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullParams {
    shape: f64,
    scale: f64,
    fit: Option<FitDiagnostics>,
}

impl WeibullParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        ensure_positive("weibull_shape", shape)?;
        ensure_positive("weibull_scale", scale)?;
        Ok(WeibullParams {
            shape,
            scale,
            fit: None,
        })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn fit(&self) -> Option<&FitDiagnostics> {
        self.fit.as_ref()
    }
}

/// Mean SBF, `y · Γ(1 + 1/g)`.
pub fn mean_exchanges(params: &WeibullParams) -> f64 {
    params.scale * gamma(1.0 + 1.0 / params.shape)
}

/// Fits shape and scale by least squares on the Weibull probability plot:
/// `ln(-ln(1 - W))` against `ln t`, with median-rank plotting positions
/// `W_i = (i - 0.3) / (N + 0.4)`. Shape is the slope, scale is
/// `exp(-intercept / shape)`.
pub fn fit_weibull(exchange_counts: &[f64]) -> Result<WeibullParams> {
    if exchange_counts.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 samples, got {}",
            exchange_counts.len()
        )));
    }
    if let Some(bad) = exchange_counts.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::invalid("exchange_counts", format!("samples must be positive, got {bad}")));
    }
    let mut sorted = exchange_counts.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted[0] == sorted[sorted.len() - 1] {
        return Err(Error::DegenerateFit("all samples are equal".into()));
    }

    let n = sorted.len() as f64;
    let points: Vec<(f64, f64)> = sorted
        .iter()
        .enumerate()
        .map(|(idx, &t)| {
            let w = (idx as f64 + 1.0 - 0.3) / (n + 0.4);
            (t.ln(), (-(-w).ln_1p()).ln())
        })
        .collect();
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    if !(slope > 0.0) {
        return Err(Error::DegenerateFit(format!("non-positive slope {slope}")));
    }
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let shape = slope;
    let scale = (-intercept / shape).exp();
    let mut params = WeibullParams::new(shape, scale)?;
    params.fit = Some(FitDiagnostics {
        intercept,
        slope,
        r_squared: 1.0 - ss_res / syy,
        n_samples: exchange_counts.len(),
    });
    Ok(params)
}

/// Inverse-transform SBF draw for a given `u` in `(0, 1]`:
/// `y · (-ln u)^{1/g}`, rounded, at least 1.
pub fn sbf_from_uniform(params: &WeibullParams, u: f64) -> u64 {
    let draw = params.scale * (-u.ln()).powf(1.0 / params.shape);
    if draw.is_finite() {
        (draw.round() as u64).max(1)
    } else {
        u64::MAX
    }
}

pub fn sample_sbf<R: Rng + ?Sized>(params: &WeibullParams, rng: &mut R) -> u64 {
    // 1 - [0, 1) keeps ln away from zero
    let u = 1.0 - rng.random::<f64>();
    sbf_from_uniform(params, u)
}

/// Probability that a carrier with `l` exchanges of budget left is still
/// running `t` hours later: `Γ(l, ωt) / Γ(l)`.
pub fn carrier_survival(l: u64, omega: f64, t: f64) -> Result<f64> {
    if l == 0 {
        return Err(Error::invalid("l", "remaining budget must be at least 1"));
    }
    if !(omega >= 0.0) || !(t >= 0.0) {
        return Err(Error::invalid("omega, t", "must be nonnegative"));
    }
    Ok(survival_unchecked(l, omega, t))
}

pub(crate) fn survival_unchecked(l: u64, omega: f64, t: f64) -> f64 {
    let x = omega * t;
    if x == 0.0 {
        1.0
    } else if x.is_infinite() {
        0.0
    } else {
        regularized_gamma_q(l as f64, x)
    }
}

/// Rate of the single exponential whose mean matches a carrier repair stage
/// followed by the given stages: `1 / (1/φ + Σ 1/θ_c)`.
pub fn exp_tail_rate(phi: f64, thetas: &[f64]) -> Result<f64> {
    if !(phi > 0.0) {
        return Err(Error::invalid("phi", format!("must be positive, got {phi}")));
    }
    let mut mean = 1.0 / phi;
    for &theta in thetas {
        ensure_positive("theta", theta)?;
        mean += 1.0 / theta;
    }
    Ok(1.0 / mean)
}

/// Carrier-aware detection rate for `j` failed nodes:
/// `jθ - θ²/(θ+φ) · Σ_{m<j} (1 - β_m)`.
///
/// `survivals` holds the carrier survival of each failed node (already
/// evaluated at the current time); only the first `j` entries are read.
/// `phi = f64::INFINITY` models instantaneous carrier repair.
pub fn detection_rate(j: usize, phi: f64, theta: f64, survivals: &ProbVector) -> Result<f64> {
    ensure_positive("theta", theta)?;
    if !(phi >= 0.0) {
        return Err(Error::invalid("phi", format!("must be nonnegative, got {phi}")));
    }
    if survivals.len() < j {
        return Err(Error::DimensionMismatch {
            expected: j,
            actual: survivals.len(),
        });
    }
    Ok(detection_rate_unchecked(&survivals.as_slice()[..j], phi, theta))
}

pub(crate) fn detection_rate_unchecked(survivals: &[f64], phi: f64, theta: f64) -> f64 {
    let j = survivals.len() as f64;
    let missing: f64 = survivals.iter().map(|b| 1.0 - b).sum();
    (j * theta - stage_penalty(theta, phi) * missing).max(0.0)
}

/// `r² / (r + φ)`, zero when carrier repair is instantaneous.
pub(crate) fn stage_penalty(rate: f64, phi: f64) -> f64 {
    if phi.is_infinite() {
        0.0
    } else {
        rate * rate / (rate + phi)
    }
}

/// Carrier-aware repair rate for `z` detected nodes with `i` available helpers.
///
/// `helper_survivals` holds the carrier survival of each of the `i` available
/// nodes, `writer_survivals` that of each of the `z` detected nodes. The
/// number of down helper carriers follows the Poisson-binomial law of the
/// helper survivals; given `l` down carriers the `k` helpers picked for the
/// rebuild include `x` of them with hypergeometric probability, and the
/// rebuild then waits `hs(x)/φ` for those carriers before the write stage of
/// rate `μ_z = zμ - μ²/(μ+φ) · Σ (1 - β_w)`.
pub fn repair_rate(
    i: usize,
    z: usize,
    k: usize,
    phi: f64,
    mu: f64,
    helper_survivals: &ProbVector,
    writer_survivals: &ProbVector,
) -> Result<f64> {
    ensure_positive("mu", mu)?;
    if !(phi >= 0.0) {
        return Err(Error::invalid("phi", format!("must be nonnegative, got {phi}")));
    }
    if z == 0 {
        return Err(Error::invalid("z", "no detected node to repair"));
    }
    if i < k || k == 0 {
        return Err(Error::invalid("i", format!("{i} available nodes cannot serve k = {k} helpers")));
    }
    if helper_survivals.len() != i {
        return Err(Error::DimensionMismatch {
            expected: i,
            actual: helper_survivals.len(),
        });
    }
    if writer_survivals.len() != z {
        return Err(Error::DimensionMismatch {
            expected: z,
            actual: writer_survivals.len(),
        });
    }
    Ok(repair_rate_unchecked(
        k,
        phi,
        mu,
        helper_survivals.as_slice(),
        writer_survivals.as_slice(),
    ))
}

pub(crate) fn repair_rate_unchecked(k: usize, phi: f64, mu: f64, helpers: &[f64], writers: &[f64]) -> f64 {
    let i = helpers.len();
    let z = writers.len() as f64;
    let missing: f64 = writers.iter().map(|b| 1.0 - b).sum();
    let mu_z = (z * mu - stage_penalty(mu, phi) * missing).max(0.0);
    if mu_z == 0.0 {
        return 0.0;
    }
    if phi.is_infinite() {
        return mu_z;
    }
    // up[o] = P(o helper carriers up)
    let up = pmf_convolution(helpers);
    let total_choices = choose(i as u64, k as u64);
    let mut rate = 0.0;
    for (down, &weight) in up.iter().rev().enumerate() {
        if weight == 0.0 {
            continue;
        }
        let mut conditional = 0.0;
        let lo = k.saturating_sub(i - down);
        for x in lo..=down.min(k) {
            let p = choose((i - down) as u64, (k - x) as u64) * choose(down as u64, x as u64) / total_choices;
            let stage = if x == 0 {
                mu_z
            } else if phi == 0.0 {
                0.0
            } else {
                1.0 / (1.0 / mu_z + harmonic(x as u64) / phi)
            };
            conditional += p * stage;
        }
        rate += weight * conditional;
    }
    rate
}

/// Time-homogeneous rates of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    /// Node failure rate, 1/hours.
    pub lambda: f64,
    /// Data repair (rebuild) rate, 1/hours.
    pub mu: f64,
    /// Failure detection rate, 1/hours.
    pub theta: f64,
    /// Carrier repair rate, 1/hours; `f64::INFINITY` for instant repair.
    pub phi: f64,
    /// Exchanges per hour per carrier.
    pub omega: f64,
}

impl RateParams {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("lambda", self.lambda)?;
        ensure_positive("mu", self.mu)?;
        ensure_positive("theta", self.theta)?;
        if !(self.phi >= 0.0) {
            return Err(Error::invalid("phi", format!("must be nonnegative, got {}", self.phi)));
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(Error::invalid("omega", format!("must be nonnegative and finite, got {}", self.omega)));
        }
        Ok(())
    }
}

/// Carrier attached to one node.
#[derive(Debug, Clone, PartialEq)]
pub struct CarrierState {
    pub node_id: usize,
    /// Exchanges made since the last replacement.
    pub exchanges_made: u64,
    /// SBF budget drawn at the last replacement.
    pub budget: u64,
    pub operational: bool,
    /// Hours since the last replacement.
    pub age_clock: f64,
}

impl CarrierState {
    pub fn fresh(node_id: usize, budget: u64) -> Self {
        CarrierState {
            node_id,
            exchanges_made: 0,
            budget: budget.max(1),
            operational: true,
            age_clock: 0.0,
        }
    }

    pub fn remaining(&self) -> u64 {
        self.budget - self.exchanges_made.min(self.budget)
    }

    /// Survival probability at the current age, measured from the last
    /// replacement with the full budget as the Gamma shape. Zero while the
    /// carrier is down.
    pub fn survival(&self, omega: f64) -> f64 {
        if self.operational {
            survival_unchecked(self.budget, omega, self.age_clock)
        } else {
            0.0
        }
    }
}
