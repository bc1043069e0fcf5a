//! Special functions used throughout the model.
//!
//! Everything here is pure and allocation-light. The gamma-family routines
//! follow the usual split: power series below the transition point,
//! Lentz continued fraction above it, and a uniform asymptotic expansion
//! once the shape parameter is large enough that either of those would need
//! thousands of terms (carrier exchange budgets run into the millions).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure_probability, Error, Result};

/// Euler–Mascheroni constant, truncated to the precision used by the
/// harmonic-sum expansion.
pub const EULER_MASCHERONI: f64 = 0.5772156649;

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 100_000;

/// Shape above which the regularized gamma switches to the asymptotic expansion.
const LARGE_SHAPE: f64 = 1000.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
    }
}

pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        ln_gamma(x).exp()
    }
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Binomial coefficient as a float. Exact for the small arguments used by
/// the hypergeometric and hard-error terms.
pub fn choose(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for m in 0..k {
        acc = acc * (n - m) as f64 / (m + 1) as f64;
    }
    acc.round_ties_even_if_small()
}

trait RoundIfSmall {
    fn round_ties_even_if_small(self) -> Self;
}

impl RoundIfSmall for f64 {
    // Products of exact integers accumulate a few ulps of drift through the
    // division; snap back while the value is still exactly representable.
    fn round_ties_even_if_small(self) -> Self {
        if self < 9.0e15 {
            self.round()
        } else {
            self
        }
    }
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn regularized_gamma_p(a: f64, x: f64) -> f64 {
    1.0 - regularized_gamma_q(a, x)
}

/// Regularized upper incomplete gamma `Q(a, x) = Γ(a, x) / Γ(a)` for
/// `a > 0`, `x >= 0`.
pub fn regularized_gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    if a >= LARGE_SHAPE {
        return gamma_q_temme(a, x);
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_continued_fraction(a, x)
    }
}

fn gamma_prefactor(a: f64, x: f64) -> f64 {
    (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * gamma_prefactor(a, x)
}

fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    gamma_prefactor(a, x) * h
}

/// Temme's uniform expansion, two correction terms. Error is of order
/// `a^{-5/2}`, below 1e-10 once `a >= 1000`.
fn gamma_q_temme(a: f64, x: f64) -> f64 {
    let lambda = x / a;
    let dl = lambda - 1.0;
    let eta_sq = 2.0 * (dl - lambda.ln());
    let eta = dl.signum() * eta_sq.max(0.0).sqrt();

    let (c0, c1) = if dl.abs() < 1e-3 {
        (
            -1.0 / 3.0 + eta / 12.0 - 2.0 * eta * eta / 135.0 + eta.powi(3) / 864.0,
            -1.0 / 540.0 - eta / 288.0,
        )
    } else {
        (
            1.0 / dl - 1.0 / eta,
            1.0 / eta.powi(3) - 1.0 / dl.powi(3) - 1.0 / (dl * dl) - 1.0 / (12.0 * dl),
        )
    };
    let head = 0.5 * erfc(eta * (a / 2.0).sqrt());
    let tail = (-0.5 * a * eta * eta).exp() / (2.0 * PI * a).sqrt() * (c0 + c1 / a);
    (head + tail).clamp(0.0, 1.0)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x >= 0.0 {
        regularized_gamma_q(0.5, x * x)
    } else {
        1.0 + regularized_gamma_p(0.5, x * x)
    }
}

/// `Γ(l, x) = ∫_x^∞ v^{l-1} e^{-v} dv` for integer `l >= 1`, by the finite sum
/// `(l-1)! e^{-x} Σ_{m<l} x^m / m!`.
pub fn upper_incomplete_gamma(l: u32, x: f64) -> Result<f64> {
    if l == 0 {
        return Err(Error::invalid("l", "shape must be at least 1"));
    }
    if !(x >= 0.0) {
        return Err(Error::invalid("x", format!("must be nonnegative, got {x}")));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut factorial = 1.0;
    for m in 1..l {
        term *= x / m as f64;
        sum += term;
        factorial *= m as f64;
    }
    Ok(factorial * (-x).exp() * sum)
}

/// Regularized incomplete beta `I_x(a, b)` by continued fraction.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid("x", format!("must lie in [0, 1], got {x}")));
    }
    if !(a > 0.0) {
        return Err(Error::invalid("a", format!("must be positive, got {a}")));
    }
    if !(b > 0.0) {
        return Err(Error::invalid("b", format!("must be positive, got {b}")));
    }
    Ok(incomplete_beta_unchecked(x, a, b))
}

pub(crate) fn incomplete_beta_unchecked(x: f64, a: f64, b: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let front = (a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b)).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b
    }
}

fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// `I_x(a, b)` for integer `a, b` as the binomial tail
/// `Σ_{j=a}^{a+b-1} C(a+b-1, j) x^j (1-x)^{a+b-1-j}`, each term in log space.
pub fn regularized_incomplete_beta_binomial(x: f64, a: u32, b: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid("x", format!("must lie in [0, 1], got {x}")));
    }
    if a == 0 || b == 0 {
        return Err(Error::invalid("a, b", "must be positive integers"));
    }
    let n = u64::from(a) + u64::from(b) - 1;
    Ok(binomial_tail(n, u64::from(a), x))
}

/// `P(Binomial(n, p) >= from)` summed term by term in log space.
pub(crate) fn binomial_tail(n: u64, from: u64, p: f64) -> f64 {
    if from == 0 {
        return 1.0;
    }
    if from > n {
        return 0.0;
    }
    if p == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return 1.0;
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let ln_n_fact = ln_gamma(n as f64 + 1.0);
    (from..=n)
        .map(|j| {
            let ln_c = ln_n_fact - ln_gamma(j as f64 + 1.0) - ln_gamma((n - j) as f64 + 1.0);
            (ln_c + j as f64 * lp + (n - j) as f64 * lq).exp()
        })
        .sum::<f64>()
        .min(1.0)
}

/// Ordered probabilities, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for &p in &values {
            ensure_probability("probability", p)?;
        }
        Ok(ProbVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl AsRef<[f64]> for ProbVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Full Poisson-binomial PMF by convolution: entry `o` is the probability
/// that exactly `o` of the independent trials succeed.
pub fn poisson_binomial_pmf(probs: &ProbVector) -> Vec<f64> {
    pmf_convolution(probs.as_slice())
}

pub(crate) fn pmf_convolution(probs: &[f64]) -> Vec<f64> {
    let mut pmf = vec![0.0; probs.len() + 1];
    pmf[0] = 1.0;
    for (seen, &p) in probs.iter().enumerate() {
        for c in (1..=seen + 1).rev() {
            pmf[c] = pmf[c] * (1.0 - p) + pmf[c - 1] * p;
        }
        pmf[0] *= 1.0 - p;
    }
    pmf
}

/// `P(successes <= o)`.
pub fn poisson_binomial_cdf(o: usize, probs: &ProbVector) -> f64 {
    if o >= probs.len() {
        return 1.0;
    }
    pmf_convolution(probs.as_slice())[..=o]
        .iter()
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// PMF from the discrete Fourier transform of the characteristic function,
/// real part taken. Kept as an independent check on the convolution route.
pub fn poisson_binomial_pmf_dft(probs: &ProbVector) -> Vec<f64> {
    let n = probs.len();
    let base = 2.0 * PI / (n + 1) as f64;
    let chars: Vec<Complex64> = (0..=n)
        .map(|l| {
            let c = Complex64::from_polar(1.0, base * l as f64);
            probs
                .as_slice()
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, &p| acc * (1.0 + (c - 1.0) * p))
        })
        .collect();
    (0..=n)
        .map(|o| {
            let total: Complex64 = chars
                .iter()
                .enumerate()
                .map(|(l, z)| Complex64::from_polar(1.0, -base * (l * o) as f64) * z)
                .sum();
            total.re / (n + 1) as f64
        })
        .collect()
}

pub fn poisson_binomial_cdf_dft(o: usize, probs: &ProbVector) -> f64 {
    if o >= probs.len() {
        return 1.0;
    }
    poisson_binomial_pmf_dft(probs)[..=o].iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarmonicMode {
    Exact,
    Approx,
}

/// Harmonic number `Σ_{m=1}^x 1/m`, either summed or from its asymptotic expansion.
pub fn harmonic_sum(x: u64, mode: HarmonicMode) -> Result<f64> {
    if x == 0 {
        return Err(Error::invalid("x", "harmonic sum needs x >= 1"));
    }
    Ok(match mode {
        HarmonicMode::Exact => harmonic(x),
        HarmonicMode::Approx => harmonic_expansion(x as f64),
    })
}

/// Exact harmonic number with `hs(0) = 0`.
pub(crate) fn harmonic(x: u64) -> f64 {
    (1..=x).rev().map(|m| 1.0 / m as f64).sum()
}

pub(crate) fn harmonic_expansion(x: f64) -> f64 {
    x.ln() + EULER_MASCHERONI + 1.0 / (2.0 * x) - 1.0 / (12.0 * x * x) + 1.0 / (120.0 * x.powi(4))
}
