//! Rate and jump-chain matrices for the three-node-state model, and the
//! analytic bounds on mean time to data loss.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::carrier::{detection_rate_unchecked, repair_rate_unchecked, RateParams};
use crate::error::{ensure_positive, ensure_probability, Error, Result};
use crate::hard_error::delta_unchecked;
use crate::special::{harmonic, harmonic_expansion, HarmonicMode, ProbVector};
use crate::states::{StateSpace, SystemState};

/// Tolerance on row sums, relative to the largest diagonal magnitude.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Generator matrix of the chain; rows sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix(DMatrix<f64>);

impl RateMatrix {
    /// Wraps a matrix after checking generator invariants.
    pub fn new(q: DMatrix<f64>) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::DimensionMismatch {
                expected: q.nrows(),
                actual: q.ncols(),
            });
        }
        let scale = q.diagonal().iter().fold(0.0f64, |m, d| m.max(d.abs()));
        for (r, row) in q.row_iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if r != c && !(v >= 0.0) {
                    return Err(Error::invalid("q", format!("off-diagonal entry ({r}, {c}) = {v}")));
                }
            }
            let sum: f64 = row.iter().sum();
            if sum.abs() > ROW_SUM_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::invalid("q", format!("row {r} sums to {sum}")));
            }
        }
        Ok(RateMatrix(q))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.0[(from, to)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Row-stochastic jump-chain matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMatrix(DMatrix<f64>);

impl ProbMatrix {
    pub fn new(p: DMatrix<f64>) -> Result<Self> {
        if !p.is_square() {
            return Err(Error::DimensionMismatch {
                expected: p.nrows(),
                actual: p.ncols(),
            });
        }
        for (r, row) in p.row_iter().enumerate() {
            if row.iter().any(|v| !(0.0..=1.0 + ROW_SUM_TOLERANCE).contains(v)) {
                return Err(Error::invalid("p", format!("row {r} has an entry outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::invalid("p", format!("row {r} sums to {sum}")));
            }
        }
        Ok(ProbMatrix(p))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.0[(from, to)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Per-state outgoing rates of the chain.
struct Outgoing {
    failure: f64,
    detection: f64,
    repair: f64,
}

fn assemble<F>(space: &StateSpace, lambda: f64, eta: f64, mut rates_for: F) -> Result<RateMatrix>
where
    F: FnMut(usize, usize, usize) -> Outgoing,
{
    ensure_probability("eta", eta)?;
    let dim = space.len();
    let absorbing = space.total_failure_index();
    let (n, k) = (space.n(), space.k());
    let mut q = DMatrix::<f64>::zeros(dim, dim);
    for (row, state) in space.states().iter().enumerate() {
        let Some((i, j, z)) = state.counts() else {
            continue;
        };
        let out = rates_for(i, j, z);
        let index = |s: SystemState| crate::states::canonical_index(s, n, k).expect("neighbour state is valid");

        // node failure, split by hard errors; Δ_k = 0 sends everything to F
        let survive = delta_unchecked(i, k, eta);
        let fail_rate = i as f64 * lambda * out.failure;
        if i > k && survive > 0.0 {
            q[(row, index(SystemState::transient(i - 1, j + 1, z)))] += fail_rate * survive;
        }
        q[(row, absorbing)] += fail_rate * (1.0 - survive);
        if j > 0 && out.detection > 0.0 {
            q[(row, index(SystemState::transient(i, j - 1, z + 1)))] += out.detection;
        }
        if z > 0 && out.repair > 0.0 {
            q[(row, index(SystemState::transient(i + 1, j, z - 1)))] += out.repair;
        }
        let total: f64 = q.row(row).iter().sum();
        q[(row, row)] = -total;
    }
    RateMatrix::new(q)
}

/// Time-homogeneous generator: failures `iλ` split by `Δ_i`, detection
/// `jθ`, repair `zμ`.
pub fn build_q(space: &StateSpace, rates: &RateParams, eta: f64) -> Result<RateMatrix> {
    ensure_positive("lambda", rates.lambda)?;
    ensure_positive("mu", rates.mu)?;
    ensure_positive("theta", rates.theta)?;
    assemble(space, rates.lambda, eta, |_, j, z| Outgoing {
        failure: 1.0,
        detection: j as f64 * rates.theta,
        repair: z as f64 * rates.mu,
    })
}

/// Generator with carrier-aware detection and repair rates.
///
/// `carrier_survivals` has one entry per node. For a state `(i, j, z)` the
/// first `i` entries are taken as the available nodes' carriers, the next
/// `j` as the failed nodes' and the last `z` as the detected nodes'.
pub fn build_q_timed(
    space: &StateSpace,
    rates: &RateParams,
    eta: f64,
    carrier_survivals: &ProbVector,
) -> Result<RateMatrix> {
    ensure_positive("lambda", rates.lambda)?;
    ensure_positive("mu", rates.mu)?;
    ensure_positive("theta", rates.theta)?;
    if !(rates.phi >= 0.0) {
        return Err(Error::invalid("phi", "must be nonnegative"));
    }
    let beta = carrier_survivals.as_slice();
    if beta.len() != space.n() {
        return Err(Error::DimensionMismatch {
            expected: space.n(),
            actual: beta.len(),
        });
    }
    let k = space.k();
    assemble(space, rates.lambda, eta, |i, j, z| Outgoing {
        failure: 1.0,
        detection: detection_rate_unchecked(&beta[i..i + j], rates.phi, rates.theta),
        repair: if z > 0 {
            repair_rate_unchecked(k, rates.phi, rates.mu, &beta[..i], &beta[i + j..])
        } else {
            0.0
        },
    })
}

/// Embedded jump chain `P = I + Q̄` with `q̄_ij = q_ij / |q_ii|`; absorbing
/// rows become self-loops.
pub fn q_to_p(q: &RateMatrix) -> ProbMatrix {
    let dim = q.dim();
    let mut p = DMatrix::<f64>::zeros(dim, dim);
    for r in 0..dim {
        let hold = -q.get(r, r);
        if hold <= 0.0 {
            p[(r, r)] = 1.0;
            continue;
        }
        for c in 0..dim {
            if c != r {
                p[(r, c)] = q.get(r, c) / hold;
            }
        }
    }
    ProbMatrix(p)
}

/// Fundamental matrix `(I - L)^{-1}` of the transient block `L`; the last
/// state is taken to be the single absorbing state.
pub fn fundamental_matrix(p: &ProbMatrix) -> Result<DMatrix<f64>> {
    let dim = p.dim();
    if dim < 2 {
        return Err(Error::invalid("p", "need at least one transient and one absorbing state"));
    }
    let t = dim - 1;
    if p.get(t, t) != 1.0 {
        return Err(Error::invalid("p", "last state is not absorbing"));
    }
    let leak = (0..t).map(|r| p.get(r, t)).collect();
    solve_m_matrix(p.matrix().view((0, 0), (t, t)).clone_owned(), leak, DMatrix::identity(t, t))
        .map_err(|_| Error::Singular("I - L has no inverse (closed transient class)".into()))
}

/// Solves `A X = B` for a nonsingular M-matrix `A = D - W`, given the
/// off-diagonal magnitudes `W` (its diagonal is ignored) and the row
/// excesses `A·1`, with nonnegative `B`.
///
/// Pivots are rebuilt from excesses and remaining off-diagonals instead of
/// being updated by subtraction (GTH elimination), so the result keeps full
/// relative accuracy even when absorption is rare and `A` is badly
/// conditioned.
fn solve_m_matrix(mut w: DMatrix<f64>, mut leak: Vec<f64>, mut b: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let t = w.nrows();
    let mut pivot = vec![0.0; t];
    for p in 0..t {
        let d = leak[p] + (p + 1..t).map(|j| w[(p, j)]).sum::<f64>();
        if !(d > 0.0) {
            return Err(Error::Singular(format!("zero pivot at transient state {p}")));
        }
        pivot[p] = d;
        for i in p + 1..t {
            let f = w[(i, p)] / d;
            if f == 0.0 {
                continue;
            }
            w[(i, p)] = 0.0;
            for j in p + 1..t {
                if j != i {
                    let add = f * w[(p, j)];
                    w[(i, j)] += add;
                }
            }
            leak[i] += f * leak[p];
            for c in 0..b.ncols() {
                let add = f * b[(p, c)];
                b[(i, c)] += add;
            }
        }
    }
    for p in (0..t).rev() {
        for c in 0..b.ncols() {
            let carried: f64 = (p + 1..t).map(|j| w[(p, j)] * b[(j, c)]).sum();
            b[(p, c)] = (b[(p, c)] + carried) / pivot[p];
        }
    }
    Ok(b)
}

/// Which route produced an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UbMethod {
    /// Expected visits from the fundamental matrix times mean hold times.
    Fundamental,
    /// Mean absorption times from `-Q_TT · T = 1`.
    LinearSolve,
}

impl UbMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            UbMethod::Fundamental => "fundamental",
            UbMethod::LinearSolve => "linear_solve",
        }
    }
}

/// Mean time to absorption from the all-available state under full carrier
/// availability.
pub fn upper_bound(space: &StateSpace, rates: &RateParams, eta: f64, method: UbMethod) -> Result<f64> {
    let q = build_q(space, rates, eta)?;
    match method {
        UbMethod::Fundamental => upper_bound_fundamental(&q),
        UbMethod::LinearSolve => Ok(mean_absorption_times(&q)?[0]),
    }
}

/// `Σ_j m_{0j} · (-1/q_jj)` over transient `j`.
pub fn upper_bound_fundamental(q: &RateMatrix) -> Result<f64> {
    let m = fundamental_matrix(&q_to_p(q))?;
    let t = q.dim() - 1;
    Ok((0..t).map(|j| m[(0, j)] * (-1.0 / q.get(j, j))).sum())
}

/// Mean absorption times from every transient state, solving `-Q_TT T = 1`.
pub fn mean_absorption_times(q: &RateMatrix) -> Result<Vec<f64>> {
    let t = q.dim() - 1;
    let mut w = q.matrix().view((0, 0), (t, t)).clone_owned();
    w.fill_diagonal(0.0);
    let leak = (0..t).map(|r| q.get(r, t)).collect();
    let times = solve_m_matrix(w, leak, DMatrix::from_element(t, 1, 1.0))?;
    Ok(times.iter().copied().collect())
}

/// Mean time to data loss with no detection and no repair: the chain can
/// only lose nodes, each failure surviving hard errors with probability `Δ_i`.
///
/// `Σ_{i=k}^{n} (1 - Δ_i) Π_{j>i} Δ_j · (hs(n) - hs(i-1)) / λ`, with the
/// harmonic differences either summed or taken from their expansion.
pub fn lower_bound(n: usize, k: usize, lambda: f64, eta: f64, mode: HarmonicMode) -> Result<f64> {
    if k < 1 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    if k > n {
        return Err(Error::invalid("k", format!("k = {k} exceeds n = {n}")));
    }
    ensure_positive("lambda", lambda)?;
    ensure_probability("eta", eta)?;
    let hs = |x: usize| -> f64 {
        match mode {
            HarmonicMode::Exact => harmonic(x as u64),
            HarmonicMode::Approx if x == 0 => 0.0,
            HarmonicMode::Approx => harmonic_expansion(x as f64),
        }
    };
    let mut total = 0.0;
    // survive = Π_{j=i+1}^{n} Δ_j, built from the top
    let mut survive = 1.0;
    for i in (k..=n).rev() {
        let d = delta_unchecked(i, k, eta);
        total += (1.0 - d) * survive * (hs(n) - hs(i - 1)) / lambda;
        survive *= d;
    }
    Ok(total)
}
