use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::fleet::{exp_wait, pick_weighted, Fleet, Role};
use super::{SimConfig, TrialOutcome};
use crate::carrier::{repair_rate_unchecked, stage_penalty};
use crate::error::Result;

/// Deterministic exhaustion: the budget is spent at exactly ω exchanges per hour.
fn fluid_lifetime(budget: u64, omega: f64, _rng: &mut ChaCha8Rng) -> f64 {
    budget as f64 / omega
}

/// One trial where detection and rebuild run at the carrier-aware
/// exponential rates, re-evaluated at every event and held fixed in between.
pub fn run_trial_approx(config: &SimConfig, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let rates = config.rates;
    let detect_penalty = stage_penalty(rates.theta, rates.phi);
    let write_penalty = stage_penalty(rates.mu, rates.phi);
    let mut fleet = Fleet::new(config, fluid_lifetime, rng);

    let lost_at = loop {
        fleet.note_availability();

        let beta: Vec<f64> = (0..config.n).map(|s| fleet.survival(s)).collect();
        let available: Vec<usize> = fleet.nodes_with(Role::Available).collect();
        let failed: Vec<usize> = fleet.nodes_with(Role::Failed).collect();
        let detected: Vec<usize> = fleet.nodes_with(Role::Detected).collect();
        let down: Vec<usize> = (0..config.n).filter(|&s| !fleet.carrier_up(s)).collect();

        let fail_rate = available.len() as f64 * rates.lambda;
        let detect_weights: Vec<f64> = failed
            .iter()
            .map(|&s| (rates.theta - detect_penalty * (1.0 - beta[s])).max(0.0))
            .collect();
        let detect_rate: f64 = detect_weights.iter().sum();
        let repair_rate = if detected.is_empty() {
            0.0
        } else {
            let helpers: Vec<f64> = available.iter().map(|&s| beta[s]).collect();
            let writers: Vec<f64> = detected.iter().map(|&s| beta[s]).collect();
            repair_rate_unchecked(config.k, rates.phi, rates.mu, &helpers, &writers)
        };
        let replace_rate = down.len() as f64 * fleet.replacement_rate();

        let total = fail_rate + detect_rate + repair_rate + replace_rate;
        let jump_at = fleet.now + exp_wait(total, rng);
        let death = fleet.next_carrier_death();

        if let Some((s, t)) = death.filter(|&(_, t)| t <= jump_at) {
            if t > config.max_sim_hours {
                break None;
            }
            fleet.advance_to(t);
            fleet.carrier_dies(s, rng);
            continue;
        }
        if jump_at > config.max_sim_hours {
            break None;
        }
        fleet.advance_to(jump_at);

        let u = rng.random::<f64>() * total;
        if u < fail_rate {
            let s = available[rng.random_range(0..available.len())];
            if !fleet.node_fails(s, rng) {
                break Some(fleet.now);
            }
        } else if u < fail_rate + detect_rate {
            let s = failed[pick_weighted(&detect_weights, rng)];
            fleet.roles[s] = Role::Detected;
        } else if u < fail_rate + detect_rate + repair_rate {
            let weights: Vec<f64> = detected
                .iter()
                .map(|&s| (rates.mu - write_penalty * (1.0 - beta[s])).max(0.0))
                .collect();
            let s = detected[pick_weighted(&weights, rng)];
            fleet.roles[s] = Role::Available;
        } else if !down.is_empty() {
            let s = down[rng.random_range(0..down.len())];
            fleet.carrier_replaced(s, rng);
        }
    };
    Ok(fleet.finish(lost_at))
}
