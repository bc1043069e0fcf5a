//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `EXPECTED_FAILURES` are reported as FAIL but do not
//! fail the run; any other failure, or an expected failure that starts
//! passing, makes the process exit nonzero.

use std::process::{Command, ExitCode};
use std::time::Instant;

use coldsim_core::carrier::{detection_rate, fit_weibull, mean_exchanges, repair_rate, sample_sbf};
use coldsim_core::hard_error::delta;
use coldsim_core::markov::{build_q, lower_bound, q_to_p, upper_bound};
use coldsim_core::sim::{run_batch, trial_rng, SimSummary, DEFAULT_HORIZON_HOURS};
use coldsim_core::special::{
    harmonic_sum, poisson_binomial_cdf, poisson_binomial_pmf, regularized_gamma_p, regularized_gamma_q,
    regularized_incomplete_beta, upper_incomplete_gamma,
};
use coldsim_core::states::{canonical_index, count_bounds, count_states, enumerate_general, index_to_state};
use coldsim_core::{
    HardErrorParams, HarmonicMode, ProbVector, RateParams, SimConfig, SimMode, StateSpace, UbMethod, UcerUnit,
    WeibullParams,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

// Pinned tolerances.
const WEIBULL_MEAN_REL: f64 = 1e-3;
const FIT_REL: f64 = 0.05;
const ROW_SUM_Q_REL: f64 = 1e-9;
const ROW_SUM_P_ABS: f64 = 1e-9;
const UB_ROUTES_REL: f64 = 1e-9;
const SIGMAS: f64 = 3.0;
const CLOSED_FORM_REL: f64 = 1e-12;
const LIMIT_REL: f64 = 1e-6;
const LIMIT_PHI: f64 = 1e12;
const DELTA_AT_ONE_ABS: f64 = 1e-8;
const SATURATION_REL: f64 = 0.05;
const PB_ABS: f64 = 1e-10;
const BETA_REFLECT_ABS: f64 = 1e-12;
const GAMMA_COMPLEMENT_ABS: f64 = 1e-10;
const HARMONIC_ABS: f64 = 1e-6;

const SIM_TRIALS: usize = 10_000;
const UB_ORACLE_TRIALS: usize = 100_000;
const LB_ORACLE_PATHS: usize = 1_000_000;

const EXPECTED_FAILURES: &[u32] = &[1];

type Outcome = Result<String, String>;

const LAMBDA: f64 = 1.0 / 50_000.0;
const MU: f64 = 1.0 / 24.0;
const THETA: f64 = 1.0 / 8760.0;

fn table_rates() -> RateParams {
    RateParams {
        lambda: LAMBDA,
        mu: MU,
        theta: THETA,
        phi: 1.0 / 48.0,
        omega: 10.0,
    }
}

fn table_hard_errors() -> HardErrorParams {
    HardErrorParams::new(1e-19, 6e12, UcerUnit::Bit, 0.001).unwrap()
}

fn table_config(n: usize, k: usize, mode: SimMode) -> SimConfig {
    SimConfig {
        n,
        k,
        rates: table_rates(),
        hard_error: table_hard_errors(),
        weibull: WeibullParams::new(0.67, 525_985.0).unwrap(),
        mode,
        trials: SIM_TRIALS,
        max_sim_hours: DEFAULT_HORIZON_HOURS,
        seed: 20_240_601,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn mean_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn exp_draw(rate: f64, rng: &mut ChaCha8Rng) -> f64 {
    -(1.0 - rng.random::<f64>()).ln() / rate
}

fn delta_oracle(i: usize, k: usize, eta: f64) -> f64 {
    let mut sum = 0.0;
    let mut binom = 1.0;
    for l in 0..i.saturating_sub(k) {
        sum += binom * eta.powi(l as i32) * (1.0 - eta).powi((i - l) as i32);
        binom = binom * (i - l) as f64 / (l + 1) as f64;
    }
    sum
}

fn c1_weibull_means() -> Outcome {
    let mut failures = Vec::new();
    let mut detail = Vec::new();
    for (g, y, quoted) in [(0.76, 491_669.0, 580_747.0), (0.67, 525_985.0, 695_563.0), (0.37, 525_985.0, 2_200_634.0)] {
        let m = mean_exchanges(&WeibullParams::new(g, y).unwrap());
        detail.push(format!("({g}, {y}) -> {m:.1}"));
        if rel(m, quoted) > WEIBULL_MEAN_REL {
            failures.push(format!("({g}, {y}) gives {m:.1}, quoted {quoted} (rel {:.2e})", rel(m, quoted)));
        }
    }
    if failures.is_empty() {
        Ok(detail.join(", "))
    } else {
        Err(failures.join("; "))
    }
}

fn c2_regression_recovery() -> Outcome {
    let truth = WeibullParams::new(0.76, 491_669.0).unwrap();
    let mut rng = trial_rng(2, 0);
    let samples: Vec<f64> = (0..50_000).map(|_| sample_sbf(&truth, &mut rng) as f64).collect();
    let fit = fit_weibull(&samples).map_err(|e| e.to_string())?;
    let msg = format!("g = {:.4}, y = {:.0}", fit.shape(), fit.scale());
    check(rel(fit.shape(), 0.76) <= FIT_REL && rel(fit.scale(), 491_669.0) <= FIT_REL, msg.clone())?;
    Ok(msg)
}

fn brute_force_count(n: usize, k: usize, s: usize) -> u128 {
    fn rec(left: usize, slots: usize) -> u128 {
        if slots == 1 {
            return 1;
        }
        (0..=left).map(|v| rec(left - v, slots - 1)).sum()
    }
    (k..=n).map(|a| rec(n - a, s - 1)).sum::<u128>() + 1
}

fn c3_state_space() -> Outcome {
    let mut cases = 0;
    for n in 1..=12 {
        for k in 1..=n {
            for s in 2..=6 {
                let count = count_states(n, k, s).map_err(|e| e.to_string())?;
                check(count == brute_force_count(n, k, s), format!("({n},{k},{s}) count {count}"))?;
                check(
                    enumerate_general(n, k, s).unwrap().len() as u128 + 1 == count,
                    format!("({n},{k},{s}) enumeration size"),
                )?;
                let b = count_bounds(n, k, s).unwrap();
                check(b.lower <= count && count <= b.upper, format!("({n},{k},{s}) bounds {b:?} vs {count}"))?;
                if s <= 3 {
                    check(b.lower == count, format!("({n},{k},{s}) lower bound not tight"))?;
                }
                cases += 1;
            }
            let space = StateSpace::enumerate(n, k).unwrap();
            for idx in 0..space.len() {
                let st = index_to_state(idx, n, k).unwrap();
                check(canonical_index(st, n, k).unwrap() == idx, format!("({n},{k}) index {idx}"))?;
            }
        }
    }
    Ok(format!("{cases} (n,k,s) cases"))
}

fn log_uniform(lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

fn c4_matrix_invariants() -> Outcome {
    let mut rng = trial_rng(4, 0);
    let mut worst_q = 0.0f64;
    let mut worst_p = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..=12);
        let k = rng.random_range(1..=n);
        let rates = RateParams {
            lambda: log_uniform(1e-7, 1e-1, &mut rng),
            mu: log_uniform(1e-4, 1.0, &mut rng),
            theta: log_uniform(1e-5, 1.0, &mut rng),
            phi: 1.0,
            omega: 1.0,
        };
        let eta = rng.random::<f64>();
        let q = build_q(&StateSpace::enumerate(n, k).unwrap(), &rates, eta).map_err(|e| e.to_string())?;
        let scale = (0..q.dim()).map(|r| q.get(r, r).abs()).fold(0.0, f64::max);
        let p = q_to_p(&q);
        for r in 0..q.dim() {
            let qs: f64 = (0..q.dim()).map(|c| q.get(r, c)).sum();
            worst_q = worst_q.max(qs.abs() / scale);
            let ps: f64 = (0..p.dim()).map(|c| p.get(r, c)).sum();
            worst_p = worst_p.max((ps - 1.0).abs());
        }
    }
    let msg = format!("max |Q row|/max|q_ii| = {worst_q:.1e}, max |P row - 1| = {worst_p:.1e}");
    check(worst_q < ROW_SUM_Q_REL && worst_p < ROW_SUM_P_ABS, msg.clone())?;
    Ok(msg)
}

fn homogeneous_path(n: usize, k: usize, eta: f64, rng: &mut ChaCha8Rng) -> f64 {
    let (mut i, mut j, mut z) = (n, 0usize, 0usize);
    let mut t = 0.0;
    loop {
        let (f, d, r) = (i as f64 * LAMBDA, j as f64 * THETA, z as f64 * MU);
        t += exp_draw(f + d + r, rng);
        let u = rng.random::<f64>() * (f + d + r);
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

fn c5_upper_bound() -> Outcome {
    let eta = table_hard_errors().eta();
    let mut detail = Vec::new();
    for (n, k) in [(4, 2), (6, 3)] {
        let space = StateSpace::enumerate(n, k).unwrap();
        let fund = upper_bound(&space, &table_rates(), eta, UbMethod::Fundamental).map_err(|e| e.to_string())?;
        let solve = upper_bound(&space, &table_rates(), eta, UbMethod::LinearSolve).map_err(|e| e.to_string())?;
        check(rel(fund, solve) <= UB_ROUTES_REL, format!("({n},{k}) routes {fund} vs {solve}"))?;
        let mut rng = trial_rng(5, n as u64);
        let samples: Vec<f64> = (0..UB_ORACLE_TRIALS).map(|_| homogeneous_path(n, k, eta, &mut rng)).collect();
        let (mean, se) = mean_se(&samples);
        check(
            (mean - solve).abs() <= SIGMAS * se,
            format!("({n},{k}) UB {solve:.0} vs simulated {mean:.0} ± {se:.0}"),
        )?;
        detail.push(format!("({n},{k}) UB {solve:.0}, sim {mean:.0} ± {se:.0}"));
    }
    Ok(detail.join("; "))
}

fn pure_death_path(n: usize, k: usize, eta: f64, rng: &mut ChaCha8Rng) -> f64 {
    let mut t = 0.0;
    for i in (k..=n).rev() {
        t += exp_draw(i as f64 * LAMBDA, rng);
        if rng.random::<f64>() >= delta_oracle(i, k, eta) {
            return t;
        }
    }
    t
}

fn c6_lower_bound() -> Outcome {
    let mut detail = Vec::new();
    for (n, k, eta) in [(4, 2, table_hard_errors().eta()), (6, 3, table_hard_errors().eta()), (6, 3, 0.1)] {
        let lb = lower_bound(n, k, LAMBDA, eta, HarmonicMode::Exact).map_err(|e| e.to_string())?;
        let mut rng = trial_rng(6, n as u64);
        let samples: Vec<f64> = (0..LB_ORACLE_PATHS).map(|_| pure_death_path(n, k, eta, &mut rng)).collect();
        let (mean, se) = mean_se(&samples);
        check(
            (mean - lb).abs() <= SIGMAS * se,
            format!("({n},{k},eta {eta:.3e}) LB {lb:.1} vs {mean:.1} ± {se:.1}"),
        )?;
        detail.push(format!("({n},{k}) LB {lb:.0} sim {mean:.0} ± {se:.0}"));
    }
    for n in 1..=16 {
        for k in 1..=n {
            let closed: f64 = (k..=n).map(|j| 1.0 / (j as f64 * LAMBDA)).sum();
            let lb0 = lower_bound(n, k, LAMBDA, 0.0, HarmonicMode::Exact).unwrap();
            check(rel(lb0, closed) <= CLOSED_FORM_REL, format!("({n},{k}) eta 0: {lb0} vs {closed}"))?;
            let lb1 = lower_bound(n, k, LAMBDA, 1.0, HarmonicMode::Exact).unwrap();
            let single = 1.0 / (n as f64 * LAMBDA);
            check(rel(lb1, single) <= CLOSED_FORM_REL, format!("({n},{k}) eta 1: {lb1} vs {single}"))?;
        }
    }
    let lb = lower_bound(4, 2, LAMBDA, 0.0, HarmonicMode::Exact).unwrap();
    check((lb - 54_166.67).abs() < 0.005, format!("(4,2) eta 0 gives {lb}"))?;
    detail.push(format!("(4,2) eta 0 = {lb:.2}"));
    Ok(detail.join("; "))
}

fn c7_limits() -> Outcome {
    let mut rng = trial_rng(7, 0);
    for _ in 0..200 {
        let j = rng.random_range(1..=8);
        let betas: Vec<f64> = (0..j).map(|_| rng.random::<f64>()).collect();
        let theta = log_uniform(1e-5, 1.0, &mut rng);
        let d = detection_rate(j, LIMIT_PHI, theta, &ProbVector::new(betas).unwrap()).unwrap();
        check(rel(d, j as f64 * theta) <= LIMIT_REL, format!("detection {d} vs {}", j as f64 * theta))?;

        let i = rng.random_range(1..=10);
        let k = rng.random_range(1..=i);
        let z = rng.random_range(1..=4);
        let mu = log_uniform(1e-3, 1.0, &mut rng);
        let helpers = ProbVector::new((0..i).map(|_| rng.random::<f64>()).collect()).unwrap();
        let writers = ProbVector::new((0..z).map(|_| rng.random::<f64>()).collect()).unwrap();
        let r = repair_rate(i, z, k, LIMIT_PHI, mu, &helpers, &writers).unwrap();
        check(rel(r, z as f64 * mu) <= LIMIT_REL, format!("repair {r} vs {}", z as f64 * mu))?;
    }
    for k in 1..=8 {
        for i in k..=k + 12 {
            let mut last = f64::INFINITY;
            for m in 1..=12 {
                let eta = 1.0 - 10f64.powi(-m);
                let d = delta(i, k, eta).unwrap();
                check(d <= last + 1e-15, format!("Δ_{i} (k={k}) not decreasing toward eta = 1"))?;
                last = d;
            }
            check(last <= DELTA_AT_ONE_ABS, format!("Δ_{i} (k={k}) = {last} near eta = 1"))?;
            check(delta(i, k, 1.0).unwrap() == 0.0, format!("Δ_{i} (k={k}) at eta = 1"))?;
        }
    }
    Ok(format!("phi = {LIMIT_PHI:e}: detection -> j·theta, repair -> z·mu; Δ_i -> 0"))
}

fn combined_se(a: &SimSummary, b: &SimSummary) -> (f64, f64) {
    (
        (a.mttdl.stderr.powi(2) + b.mttdl.stderr.powi(2)).sqrt(),
        (a.mttdu.stderr.powi(2) + b.mttdu.stderr.powi(2)).sqrt(),
    )
}

fn batch(cfg: &SimConfig) -> Result<SimSummary, String> {
    run_batch(cfg).map_err(|e| e.to_string())
}

fn c8_exponential_tail() -> Outcome {
    let grid = [1.0 / 336.0, 1.0 / 168.0, 1.0 / 96.0, 1.0 / 48.0, 1.0 / 12.0];
    let mut worst = f64::NEG_INFINITY;
    for omega in [10.0, 100.0] {
        for &phi in &grid {
            let mut exact = table_config(4, 2, SimMode::Exact);
            exact.rates.phi = phi;
            exact.rates.omega = omega;
            let approx = SimConfig {
                mode: SimMode::Approx,
                ..exact.clone()
            };
            let e = batch(&exact)?;
            let a = batch(&approx)?;
            let (_, se) = combined_se(&e, &a);
            let excess = (a.mttdu.mean - e.mttdu.mean) / se;
            worst = worst.max(excess);
            check(
                a.mttdu.mean <= e.mttdu.mean + SIGMAS * se,
                format!("omega {omega}, phi {phi:.5}: approx {:.4e} > exact {:.4e} + 3·{se:.2e}", a.mttdu.mean, e.mttdu.mean),
            )?;
            check(
                a.mttdu.mean.log10().floor() == e.mttdu.mean.log10().floor(),
                format!("omega {omega}, phi {phi:.5}: nines differ ({:.4e} vs {:.4e})", a.mttdu.mean, e.mttdu.mean),
            )?;
        }
    }
    Ok(format!("max (approx - exact)/se = {worst:.2}"))
}

fn c9_exchange_asymptotes() -> Outcome {
    let eta = table_hard_errors().eta();
    let mut quiet = table_config(4, 2, SimMode::Exact);
    quiet.rates.omega = 1e-3;
    let ub = upper_bound(&StateSpace::enumerate(4, 2).unwrap(), &quiet.rates, eta, UbMethod::LinearSolve).unwrap();
    let s = batch(&quiet)?;
    check(
        (s.mttdl.mean - ub).abs() <= SIGMAS * s.mttdl.stderr,
        format!("omega -> 0: MTTDL {:.0} ± {:.0} vs UB {ub:.0}", s.mttdl.mean, s.mttdl.stderr),
    )?;

    let mut busy = table_config(4, 2, SimMode::Exact);
    busy.rates.omega = 1e7;
    busy.rates.phi = 1e-9;
    let lb = lower_bound(4, 2, LAMBDA, eta, HarmonicMode::Exact).unwrap();
    let d = batch(&busy)?;
    check(
        (d.mttdl.mean - lb).abs() <= SIGMAS * d.mttdl.stderr,
        format!("omega large, phi small: MTTDL {:.0} ± {:.0} vs LB {lb:.0}", d.mttdl.mean, d.mttdl.stderr),
    )?;

    let grid = [0.1, 1.0, 10.0, 100.0, 1000.0];
    let mut trend = Vec::new();
    let mut prev: Option<SimSummary> = None;
    for &omega in &grid {
        let mut cfg = table_config(4, 2, SimMode::Exact);
        cfg.rates.omega = omega;
        let cur = batch(&cfg)?;
        if let Some(p) = &prev {
            let (_, se) = combined_se(p, &cur);
            check(
                cur.mttdu.mean <= p.mttdu.mean + SIGMAS * se,
                format!("MTTDU rises at omega {omega}: {:.4e} after {:.4e}", cur.mttdu.mean, p.mttdu.mean),
            )?;
        }
        trend.push(format!("{:.3e}", cur.mttdu.mean));
        prev = Some(cur);
    }
    Ok(format!(
        "UB {ub:.0} vs {:.0}; LB {lb:.0} vs {:.0}; MTTDU over omega {grid:?}: [{}]",
        s.mttdl.mean,
        d.mttdl.mean,
        trend.join(", ")
    ))
}

fn c10_carrier_repair() -> Outcome {
    let grid = [1.0 / 168.0, 1.0 / 48.0, 1.0 / 12.0, 0.25, 1.0];
    let mut means = Vec::new();
    let mut prev: Option<SimSummary> = None;
    let mut last_change = 0.0;
    for &phi in &grid {
        let mut cfg = table_config(4, 2, SimMode::Exact);
        cfg.rates.omega = 100.0;
        cfg.rates.phi = phi;
        let cur = batch(&cfg)?;
        if let Some(p) = &prev {
            let (_, se) = combined_se(p, &cur);
            check(
                cur.mttdu.mean >= p.mttdu.mean - SIGMAS * se,
                format!("MTTDU falls at phi {phi}: {:.4e} after {:.4e}", cur.mttdu.mean, p.mttdu.mean),
            )?;
            last_change = rel(cur.mttdu.mean, p.mttdu.mean);
        }
        means.push(format!("{:.3e}", cur.mttdu.mean));
        prev = Some(cur);
    }
    check(last_change < SATURATION_REL, format!("no saturation: last step changes MTTDU by {:.1}%", 100.0 * last_change))?;
    let eta = table_hard_errors().eta();
    let lb42 = lower_bound(4, 2, LAMBDA, eta, HarmonicMode::Exact).unwrap();
    let lb63 = lower_bound(6, 3, LAMBDA, eta, HarmonicMode::Exact).unwrap();
    check(lb42 > lb63, format!("LB(4,2) {lb42} <= LB(6,3) {lb63}"))?;
    Ok(format!(
        "MTTDU over phi: [{}], last step {:.2}%; LB(4,2) {lb42:.0} > LB(6,3) {lb63:.0}",
        means.join(", "),
        100.0 * last_change
    ))
}

fn c11_special_functions() -> Outcome {
    let mut rng = trial_rng(11, 0);
    for len in 1..=10 {
        for _ in 0..200 {
            let p: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
            let mut brute = vec![0.0; len + 1];
            for mask in 0u32..(1 << len) {
                let mut prob = 1.0;
                for (bit, &pi) in p.iter().enumerate() {
                    prob *= if mask >> bit & 1 == 1 { pi } else { 1.0 - pi };
                }
                brute[mask.count_ones() as usize] += prob;
            }
            let probs = ProbVector::new(p).unwrap();
            let pmf = poisson_binomial_pmf(&probs);
            let mut acc = 0.0;
            for o in 0..=len {
                check((pmf[o] - brute[o]).abs() < PB_ABS, format!("pmf len {len} o {o}"))?;
                acc += brute[o];
                check((poisson_binomial_cdf(o, &probs) - acc).abs() < PB_ABS, format!("cdf len {len} o {o}"))?;
            }
        }
        for pi in [0.0, 0.1, 0.37, 0.5, 0.93, 1.0] {
            let probs = ProbVector::new(vec![pi; len]).unwrap();
            let mut binom = 1.0;
            let mut acc = 0.0;
            for o in 0..=len {
                acc += binom * pi.powi(o as i32) * (1.0 - pi).powi((len - o) as i32);
                binom = binom * (len - o) as f64 / (o + 1) as f64;
                check((poisson_binomial_cdf(o, &probs) - acc).abs() < PB_ABS, format!("binomial len {len} p {pi}"))?;
            }
        }
    }
    let mut worst_h = 0.0f64;
    for x in 5..=10_000u64 {
        let d = (harmonic_sum(x, HarmonicMode::Approx).unwrap() - harmonic_sum(x, HarmonicMode::Exact).unwrap()).abs();
        worst_h = worst_h.max(d);
    }
    check(worst_h < HARMONIC_ABS, format!("harmonic expansion error {worst_h:e}"))?;
    let mut fact = 1.0;
    for l in 1..=22u32 {
        check(upper_incomplete_gamma(l, 0.0).unwrap() == fact, format!("Γ({l}, 0) != {fact}"))?;
        fact *= l as f64;
    }
    let mut worst_beta = 0.0f64;
    let mut worst_gamma = 0.0f64;
    for _ in 0..5000 {
        let x = rng.random::<f64>();
        let a = log_uniform(0.05, 60.0, &mut rng);
        let b = log_uniform(0.05, 60.0, &mut rng);
        let s = regularized_incomplete_beta(x, a, b).unwrap() + regularized_incomplete_beta(1.0 - x, b, a).unwrap();
        worst_beta = worst_beta.max((s - 1.0).abs());
        let ga = log_uniform(0.01, 5000.0, &mut rng);
        let gx = rng.random::<f64>() * 2.0 * ga;
        worst_gamma = worst_gamma.max((regularized_gamma_p(ga, gx) + regularized_gamma_q(ga, gx) - 1.0).abs());
    }
    check(worst_beta < BETA_REFLECT_ABS, format!("beta reflection error {worst_beta:e}"))?;
    check(worst_gamma < GAMMA_COMPLEMENT_ABS, format!("gamma complement error {worst_gamma:e}"))?;
    Ok(format!("harmonic {worst_h:.1e}, beta {worst_beta:.1e}, gamma {worst_gamma:.1e}"))
}

fn c12_cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "n = 4\nk = 2\ntrials = 2000\nomega_xph = 100.0\n").map_err(|e| e.to_string())?;
    let mut dumps = Vec::new();
    for (tag, workers) in [("a", Some("1")), ("b", Some("4")), ("c", None), ("d", Some("2"))] {
        let path = dir.path().join(format!("{tag}.csv"));
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_coldsim"));
        cmd.arg("simulate")
            .arg("--config")
            .arg(&cfg)
            .arg("--trials-csv")
            .arg(&path)
            .env("COLDSIM_SEED", "123456789");
        if let Some(w) = workers {
            cmd.args(["--workers", w]);
        }
        let out = cmd.output().map_err(|e| e.to_string())?;
        check(out.status.success(), format!("simulate exited with {:?}", out.status.code()))?;
        dumps.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    check(dumps.windows(2).all(|w| w[0] == w[1]), "per-trial CSV differs between runs")?;
    Ok(format!("4 runs, workers 1/4/all/2, {} identical bytes", dumps[0].len()))
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "Weibull mean reproduction", c1_weibull_means),
        (2, "regression recovery", c2_regression_recovery),
        (3, "state-space exactness", c3_state_space),
        (4, "matrix invariants", c4_matrix_invariants),
        (5, "upper bound oracle equivalence", c5_upper_bound),
        (6, "lower bound oracle equivalence", c6_lower_bound),
        (7, "limit fidelity", c7_limits),
        (8, "exponential-tail approximation ordering", c8_exponential_tail),
        (9, "exchange-rate asymptotes", c9_exchange_asymptotes),
        (10, "carrier repair saturation and blocklength", c10_carrier_repair),
        (11, "special-function suite", c11_special_functions),
        (12, "CLI determinism", c12_cli_determinism),
    ];
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let expected_fail = EXPECTED_FAILURES.contains(&id);
        match outcome {
            Ok(detail) => {
                println!("PASS criterion {id}: {name} ({detail}) [{secs:.2}s]");
                if expected_fail {
                    println!("  criterion {id} was expected to fail; update EXPECTED_FAILURES");
                    unexpected += 1;
                }
            }
            Err(reason) => {
                println!("FAIL criterion {id}: {name} ({reason}) [{secs:.2}s]");
                if expected_fail {
                    println!("  known failure");
                } else {
                    unexpected += 1;
                }
            }
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
