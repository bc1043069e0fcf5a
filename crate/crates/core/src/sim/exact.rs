use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use super::fleet::{exp_wait, Fleet, Role};
use super::{SimConfig, TrialOutcome};
use crate::error::Result;

/// Rebuild of one detected node: `k` helpers are read once all their
/// carriers are up, then the writer stores the rebuilt chunk.
#[derive(Debug, Clone)]
struct Rebuild {
    helpers: Vec<usize>,
    gathered: bool,
}

#[derive(Debug, Clone, Copy)]
enum Event {
    NodeFailure(usize),
    Detection(usize),
    RepairDone(usize),
    CarrierReplaced(usize),
}

/// Sum of `budget` Exponential(ω) inter-exchange times.
fn gamma_lifetime(budget: u64, omega: f64, rng: &mut ChaCha8Rng) -> f64 {
    match Gamma::new(budget as f64, 1.0 / omega) {
        Ok(g) => g.sample(rng),
        Err(_) => f64::INFINITY,
    }
}

/// One trial with every mechanism simulated directly.
pub fn run_trial_exact(config: &SimConfig, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let rates = config.rates;
    let k = config.k;
    let mut fleet = Fleet::new(config, gamma_lifetime, rng);
    let mut rebuilds: Vec<Option<Rebuild>> = vec![None; config.n];
    let mut events: Vec<(f64, Event)> = Vec::with_capacity(2 * config.n);

    let lost_at = loop {
        for r in rebuilds.iter_mut().flatten() {
            if !r.gathered && r.helpers.iter().all(|&h| fleet.carrier_up(h)) {
                r.gathered = true;
            }
        }
        fleet.note_availability();

        events.clear();
        let replace = fleet.replacement_rate();
        for (s, rebuild) in rebuilds.iter().enumerate() {
            let up = fleet.carrier_up(s);
            match fleet.roles[s] {
                Role::Available => events.push((rates.lambda, Event::NodeFailure(s))),
                Role::Failed if up => events.push((rates.theta, Event::Detection(s))),
                Role::Detected if up && rebuild.as_ref().is_some_and(|r| r.gathered) => {
                    events.push((rates.mu, Event::RepairDone(s)))
                }
                _ => {}
            }
            if !up && replace > 0.0 {
                events.push((replace, Event::CarrierReplaced(s)));
            }
        }
        let total: f64 = events.iter().map(|e| e.0).sum();
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

        let mut target = rng.random::<f64>() * total;
        let mut chosen = events[events.len() - 1].1;
        for &(rate, event) in &events {
            if target < rate {
                chosen = event;
                break;
            }
            target -= rate;
        }

        match chosen {
            Event::NodeFailure(s) => {
                if !fleet.node_fails(s, rng) {
                    break Some(fleet.now);
                }
                for r in rebuilds.iter_mut().flatten() {
                    if r.gathered {
                        continue;
                    }
                    if let Some(pos) = r.helpers.iter().position(|&h| h == s) {
                        let spare: Vec<usize> = fleet
                            .nodes_with(Role::Available)
                            .filter(|h| !r.helpers.contains(h))
                            .collect();
                        r.helpers[pos] = spare[rng.random_range(0..spare.len())];
                    }
                }
            }
            Event::Detection(s) => {
                let available: Vec<usize> = fleet.nodes_with(Role::Available).collect();
                let helpers = sample(rng, available.len(), k).into_iter().map(|x| available[x]).collect();
                fleet.roles[s] = Role::Detected;
                rebuilds[s] = Some(Rebuild {
                    helpers,
                    gathered: false,
                });
            }
            Event::RepairDone(s) => {
                fleet.roles[s] = Role::Available;
                rebuilds[s] = None;
            }
            Event::CarrierReplaced(s) => fleet.carrier_replaced(s, rng),
        }
    };
    Ok(fleet.finish(lost_at))
}
