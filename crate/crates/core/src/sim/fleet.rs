//! Node and carrier bookkeeping shared by both trial kernels.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{FirstPassage, SimConfig, TrialOutcome};
use crate::carrier::{sample_sbf, CarrierState};
use crate::hard_error::delta_unchecked;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Role {
    Available,
    Failed,
    Detected,
}

/// How a carrier's lifetime is drawn from its budget.
pub(super) type Lifetime = fn(u64, f64, &mut ChaCha8Rng) -> f64;

pub(super) struct Fleet<'a> {
    pub config: &'a SimConfig,
    pub roles: Vec<Role>,
    pub carriers: Vec<CarrierState>,
    /// Absolute time an operational carrier runs out of budget.
    pub dies_at: Vec<f64>,
    pub replaced_at: Vec<f64>,
    pub now: f64,
    lifetime: Lifetime,
    spent_exchanges: u64,
    pub carrier_failures: u64,
    pub node_failures: u64,
    unavailable_at: Option<f64>,
}

impl<'a> Fleet<'a> {
    pub fn new(config: &'a SimConfig, lifetime: Lifetime, rng: &mut ChaCha8Rng) -> Self {
        let n = config.n;
        let mut fleet = Fleet {
            config,
            roles: vec![Role::Available; n],
            carriers: (0..n).map(|s| CarrierState::fresh(s, 1)).collect(),
            dies_at: vec![f64::INFINITY; n],
            replaced_at: vec![0.0; n],
            now: 0.0,
            lifetime,
            spent_exchanges: 0,
            carrier_failures: 0,
            node_failures: 0,
            unavailable_at: None,
        };
        for s in 0..n {
            fleet.install_carrier(s, rng);
        }
        fleet
    }

    fn install_carrier(&mut self, s: usize, rng: &mut ChaCha8Rng) {
        let budget = sample_sbf(&self.config.weibull, rng);
        self.carriers[s] = CarrierState::fresh(s, budget);
        self.replaced_at[s] = self.now;
        let omega = self.config.rates.omega;
        self.dies_at[s] = if omega > 0.0 {
            self.now + (self.lifetime)(self.carriers[s].budget, omega, rng)
        } else {
            f64::INFINITY
        };
    }

    pub fn nodes_with(&self, role: Role) -> impl Iterator<Item = usize> + '_ {
        (0..self.roles.len()).filter(move |&s| self.roles[s] == role)
    }

    pub fn count(&self, role: Role) -> usize {
        self.roles.iter().filter(|&&r| r == role).count()
    }

    pub fn carrier_up(&self, s: usize) -> bool {
        self.carriers[s].operational
    }

    /// Earliest carrier exhaustion, if any carrier is running.
    pub fn next_carrier_death(&self) -> Option<(usize, f64)> {
        self.dies_at
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, t)| t.is_finite())
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn advance_to(&mut self, t: f64) {
        self.now = t;
        let omega = self.config.rates.omega;
        for (s, c) in self.carriers.iter_mut().enumerate() {
            if c.operational {
                c.age_clock = t - self.replaced_at[s];
                c.exchanges_made = ((omega * c.age_clock).floor() as u64).min(c.budget - 1);
            }
        }
    }

    /// Current carrier survival probability of node `s`.
    pub fn survival(&self, s: usize) -> f64 {
        self.carriers[s].survival(self.config.rates.omega)
    }

    /// Carrier of `s` exhausts its budget. With instant carrier repair the
    /// replacement is installed on the spot.
    pub fn carrier_dies(&mut self, s: usize, rng: &mut ChaCha8Rng) {
        let c = &mut self.carriers[s];
        self.spent_exchanges = self.spent_exchanges.saturating_add(c.budget);
        c.exchanges_made = c.budget;
        c.operational = false;
        self.dies_at[s] = f64::INFINITY;
        self.carrier_failures += 1;
        if self.config.rates.phi.is_infinite() {
            self.install_carrier(s, rng);
        }
    }

    pub fn carrier_replaced(&mut self, s: usize, rng: &mut ChaCha8Rng) {
        self.install_carrier(s, rng);
    }

    /// Rate at which each down carrier is replaced.
    pub fn replacement_rate(&self) -> f64 {
        let phi = self.config.rates.phi;
        if phi.is_finite() {
            phi
        } else {
            0.0
        }
    }

    /// Available node `s` fails. Returns `false` when hard errors on the
    /// surviving chunks make the data unrecoverable.
    pub fn node_fails(&mut self, s: usize, rng: &mut ChaCha8Rng) -> bool {
        let i = self.count(Role::Available);
        self.node_failures += 1;
        let survive = delta_unchecked(i, self.config.k, self.config.hard_error.eta());
        if rng.random::<f64>() >= survive {
            return false;
        }
        self.roles[s] = Role::Failed;
        true
    }

    /// Records the first moment fewer than `k` available nodes have a
    /// working carrier.
    pub fn note_availability(&mut self) {
        if self.unavailable_at.is_some() {
            return;
        }
        let usable = self.nodes_with(Role::Available).filter(|&s| self.carrier_up(s)).count();
        if usable < self.config.k {
            self.unavailable_at = Some(self.now);
        }
    }

    pub fn finish(mut self, lost_at: Option<f64>) -> TrialOutcome {
        let horizon = self.config.max_sim_hours;
        let end = lost_at.unwrap_or(horizon);
        self.advance_to(end);
        let live: u64 = self
            .carriers
            .iter()
            .filter(|c| c.operational)
            .fold(0u64, |acc, c| acc.saturating_add(c.exchanges_made));
        let time_to_data_loss = match lost_at {
            Some(t) => FirstPassage::observed(t),
            None => FirstPassage::censored_at(horizon),
        };
        let time_to_first_unavailability = match (self.unavailable_at, lost_at) {
            (Some(u), _) => FirstPassage::observed(u),
            (None, Some(t)) => FirstPassage::observed(t),
            (None, None) => FirstPassage::censored_at(horizon),
        };
        TrialOutcome {
            time_to_data_loss,
            time_to_first_unavailability,
            total_exchanges: self.spent_exchanges.saturating_add(live),
            carrier_failures: self.carrier_failures,
            node_failures: self.node_failures,
        }
    }
}

/// Picks an index with probability proportional to `weights`; uniform when
/// every weight is zero.
pub(super) fn pick_weighted(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return rng.random_range(0..weights.len());
    }
    let mut target = rng.random::<f64>() * total;
    for (idx, &w) in weights.iter().enumerate() {
        if target < w {
            return idx;
        }
        target -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}

/// Exponential waiting time at `rate`; infinite when nothing can happen.
pub(super) fn exp_wait(rate: f64, rng: &mut ChaCha8Rng) -> f64 {
    if rate > 0.0 {
        -(1.0 - rng.random::<f64>()).ln() / rate
    } else {
        f64::INFINITY
    }
}
