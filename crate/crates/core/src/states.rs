//! Markov state space of an `(n, k)` system.
//!
//! A transient state counts how many of the `n` nodes are available (A),
//! failed but undetected (F) and detected awaiting repair (D). Data stays
//! recoverable while at least `k` nodes are available; everything else is
//! lumped into one absorbing total-failure state.
//!
//! Counting and bounds work for any number of node states `s >= 2`; the
//! executable chain is built for `s = 3`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest `n` accepted by [`StateSpace::enumerate`] unless a limit is given.
pub const DEFAULT_MAX_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemState {
    Transient {
        available: usize,
        failed: usize,
        detected: usize,
    },
    TotalFailure,
}

impl SystemState {
    pub fn transient(available: usize, failed: usize, detected: usize) -> Self {
        SystemState::Transient {
            available,
            failed,
            detected,
        }
    }

    pub fn is_total_failure(&self) -> bool {
        matches!(self, SystemState::TotalFailure)
    }

    /// `(i, j, z)` for transient states.
    pub fn counts(&self) -> Option<(usize, usize, usize)> {
        match *self {
            SystemState::Transient {
                available,
                failed,
                detected,
            } => Some((available, failed, detected)),
            SystemState::TotalFailure => None,
        }
    }

    fn validate(&self, n: usize, k: usize) -> Result<()> {
        if let SystemState::Transient {
            available,
            failed,
            detected,
        } = *self
        {
            if available < k || available > n || available + failed + detected != n {
                return Err(Error::invalid(
                    "state",
                    format!("({available}A, {failed}F, {detected}D) is not a state of the ({n}, {k}) system"),
                ));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SystemState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemState::Transient {
                available,
                failed,
                detected,
            } => write!(f, "({available}A,{failed}F,{detected}D)"),
            SystemState::TotalFailure => f.write_str("F"),
        }
    }
}

fn validate_code(n: usize, k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    if k > n {
        return Err(Error::invalid("k", format!("k = {k} exceeds n = {n}")));
    }
    Ok(())
}

fn validate_counting(n: usize, k: usize, s: usize) -> Result<()> {
    validate_code(n, k)?;
    if s < 2 {
        return Err(Error::invalid("s", "need at least two node states"));
    }
    Ok(())
}

fn binomial(n: u128, k: u128) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for m in 0..k {
        // acc * (n - m) is divisible by (m + 1) at every step
        acc = acc
            .checked_mul(n - m)
            .ok_or_else(|| Error::invalid("n", "state count overflows u128"))?
            / (m + 1);
    }
    Ok(acc)
}

/// Number of Markov states including total failure: `C(n-k+s-1, n-k) + 1`.
pub fn count_states(n: usize, k: usize, s: usize) -> Result<u128> {
    validate_counting(n, k, s)?;
    let d = (n - k) as u128;
    Ok(binomial(d + s as u128 - 1, d)? + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountBounds {
    pub lower: u128,
    pub upper: u128,
}

/// Closed-form bounds `Σ_{j<s} C(n-k+1, j) <= N_s <= C(s+n-k, s-1)`.
pub fn count_bounds(n: usize, k: usize, s: usize) -> Result<CountBounds> {
    validate_counting(n, k, s)?;
    let d1 = (n - k + 1) as u128;
    let mut lower = 0u128;
    for j in 0..s as u128 {
        lower += binomial(d1, j)?;
    }
    let upper = binomial((s + n - k) as u128, s as u128 - 1)?;
    Ok(CountBounds { lower, upper })
}

/// Tighter lower bound
/// `Σ_{j=2}^{s-1} ((s-2)/(j-1))^{j-1} C(n-k+1, j) + Σ_{j<=1} C(n-k+1, j)`.
pub fn count_lower_bound_tight(n: usize, k: usize, s: usize) -> Result<f64> {
    validate_counting(n, k, s)?;
    let d1 = (n - k + 1) as u128;
    let mut acc = 1.0 + d1 as f64;
    for j in 2..s {
        let weight = ((s - 2) as f64 / (j - 1) as f64).powi(j as i32 - 1);
        acc += weight * binomial(d1, j as u128)? as f64;
    }
    Ok(acc)
}

/// Zero-based index of a state: `C(n-i+1, 2) + z` for transient states,
/// `N_3 - 1` for total failure.
pub fn canonical_index(state: SystemState, n: usize, k: usize) -> Result<usize> {
    validate_code(n, k)?;
    state.validate(n, k)?;
    Ok(match state {
        SystemState::Transient {
            available, detected, ..
        } => {
            let d = n - available;
            d * (d + 1) / 2 + detected
        }
        SystemState::TotalFailure => transient_count(n, k),
    })
}

/// Inverse of [`canonical_index`].
pub fn index_to_state(index: usize, n: usize, k: usize) -> Result<SystemState> {
    validate_code(n, k)?;
    let transient = transient_count(n, k);
    if index == transient {
        return Ok(SystemState::TotalFailure);
    }
    if index > transient {
        return Err(Error::invalid(
            "index",
            format!("{index} out of range for {} states", transient + 1),
        ));
    }
    // largest d with d(d+1)/2 <= index
    let mut d = 0;
    while (d + 1) * (d + 2) / 2 <= index {
        d += 1;
    }
    let z = index - d * (d + 1) / 2;
    Ok(SystemState::transient(n - d, d - z, z))
}

fn transient_count(n: usize, k: usize) -> usize {
    let d = n - k;
    (d + 1) * (d + 2) / 2
}

/// Enumerated three-node-state space, ordered by canonical index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    n: usize,
    k: usize,
    states: Vec<SystemState>,
}

impl StateSpace {
    pub fn enumerate(n: usize, k: usize) -> Result<Self> {
        Self::enumerate_with_limit(n, k, DEFAULT_MAX_NODES)
    }

    pub fn enumerate_with_limit(n: usize, k: usize, max_nodes: usize) -> Result<Self> {
        validate_code(n, k)?;
        if n > max_nodes {
            return Err(Error::invalid("n", format!("{n} exceeds the limit of {max_nodes} nodes")));
        }
        let mut states = Vec::with_capacity(transient_count(n, k) + 1);
        for d in 0..=n - k {
            for z in 0..=d {
                states.push(SystemState::transient(n - d, d - z, z));
            }
        }
        states.push(SystemState::TotalFailure);
        Ok(StateSpace { n, k, states })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[SystemState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> Option<SystemState> {
        self.states.get(index).copied()
    }

    pub fn index_of(&self, state: SystemState) -> Option<usize> {
        canonical_index(state, self.n, self.k).ok()
    }

    pub fn total_failure_index(&self) -> usize {
        self.states.len() - 1
    }

    /// Index of the all-available starting state.
    pub fn initial_index(&self) -> usize {
        0
    }
}

/// Transient states for general `s` as per-node-state counts
/// `[available, c_1, …, c_{s-1}]`, ordered by decreasing availability and
/// then lexicographically.
pub fn enumerate_general(n: usize, k: usize, s: usize) -> Result<Vec<Vec<usize>>> {
    validate_counting(n, k, s)?;
    let mut out = Vec::new();
    for available in (k..=n).rev() {
        let mut rest = vec![0usize; s - 1];
        compositions(n - available, 0, &mut rest, &mut |parts| {
            let mut row = Vec::with_capacity(s);
            row.push(available);
            row.extend_from_slice(parts);
            out.push(row);
        });
    }
    Ok(out)
}

fn compositions(remaining: usize, slot: usize, parts: &mut [usize], emit: &mut dyn FnMut(&[usize])) {
    if slot + 1 == parts.len() {
        parts[slot] = remaining;
        emit(parts);
        return;
    }
    for v in (0..=remaining).rev() {
        parts[slot] = v;
        compositions(remaining - v, slot + 1, parts, emit);
    }
}
