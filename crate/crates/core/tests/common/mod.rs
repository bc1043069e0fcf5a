#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const LAMBDA: f64 = 1.0 / 50_000.0;
pub const MU: f64 = 1.0 / 24.0;
pub const THETA: f64 = 1.0 / 8760.0;

/// Combined hard error rate for 6 TB tapes, UCER 1e-19 per bit, κ = 0.001.
pub fn table_eta() -> f64 {
    let eps = 1.0 - (1.0 - 1e-19f64).powf(4.8e13);
    1.0 - (1.0 - eps) * (1.0 - 0.001)
}

/// P(at most i-k-1 of i reads fail), by direct summation.
pub fn delta_oracle(i: usize, k: usize, eta: f64) -> f64 {
    let mut sum = 0.0;
    let mut binom = 1.0;
    for l in 0..i.saturating_sub(k) {
        sum += binom * eta.powi(l as i32) * (1.0 - eta).powi((i - l) as i32);
        binom = binom * (i - l) as f64 / (l + 1) as f64;
    }
    sum
}

fn exp(rate: f64, rng: &mut ChaCha8Rng) -> f64 {
    -(1.0 - rng.random::<f64>()).ln() / rate
}

/// Time to data loss of the homogeneous three-state chain, simulated from
/// its transition rules.
pub fn homogeneous_path(n: usize, k: usize, lambda: f64, theta: f64, mu: f64, eta: f64, rng: &mut ChaCha8Rng) -> f64 {
    let (mut i, mut j, mut z) = (n, 0usize, 0usize);
    let mut t = 0.0;
    loop {
        let (f, d, r) = (i as f64 * lambda, j as f64 * theta, z as f64 * mu);
        let total = f + d + r;
        t += exp(total, rng);
        let u = rng.random::<f64>() * total;
        if u < f {
            if rng.random::<f64>() >= delta_oracle(i, k, eta) {
                return t;
            }
            i -= 1;
            j += 1;
        } else if u < f + d {
            j -= 1;
            z += 1;
        } else {
            z -= 1;
            i += 1;
        }
    }
}

/// Time to data loss when nothing is ever detected or repaired.
pub fn pure_death_path(n: usize, k: usize, lambda: f64, eta: f64, rng: &mut ChaCha8Rng) -> f64 {
    let mut t = 0.0;
    for i in (k..=n).rev() {
        t += exp(i as f64 * lambda, rng);
        if rng.random::<f64>() >= delta_oracle(i, k, eta) {
            return t;
        }
    }
    unreachable!("delta at i = k is zero")
}

pub fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
