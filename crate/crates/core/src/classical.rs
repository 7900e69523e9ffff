//! Classical random walks over clip networks.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::Rng;
use thiserror::Error;

use crate::ecm::{ClipId, ClipKind, ClipNetwork, StochasticMatrix, STOCHASTIC_TOL};
use crate::rng::sample_index;

/// Power-iteration budget for [`stationary_distribution`].
pub const MAX_POWER_ITERATIONS: usize = 1_000_000;
/// Step budget for [`standard_ps_deliberate`].
pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("not a probability vector: {0}")]
    InvalidDistribution(String),
    #[error("power iteration did not converge within {0} iterations")]
    NotConverged(usize),
    #[error("second eigenvalue has modulus {0}; the stationary distribution is not unique")]
    DominantEigenvalueTie(f64),
    #[error("chain is not ergodic (second eigenvalue modulus {0})")]
    NotErgodic(f64),
    #[error("target set has zero probability mass")]
    EmptyTail,
    #[error("walk did not reach an action within {0} steps")]
    StepLimitExceeded(u64),
    #[error("walk cannot start at {0}")]
    InvalidStart(ClipId),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Probability distribution over clips: entries non-negative, summing to one
/// within `1e-12`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self, WalkError> {
        if entries.is_empty() {
            return Err(WalkError::InvalidDistribution("empty".into()));
        }
        if let Some(x) = entries.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(WalkError::InvalidDistribution(format!("entry {x}")));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(WalkError::InvalidDistribution(format!("sum {sum}")));
        }
        Ok(ProbabilityVector(entries))
    }

    /// Normalises non-negative weights with positive total.
    pub fn from_weights(weights: &[f64]) -> Result<Self, WalkError> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(WalkError::InvalidDistribution(format!("weights {weights:?}")));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Self {
        ProbabilityVector(vec![1.0 / n as f64; n])
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

    pub fn get(&self, id: ClipId) -> f64 {
        self.0[id.index()]
    }

    /// Total probability of `targets`; ids outside the vector count as zero.
    pub fn mass(&self, targets: &BTreeSet<ClipId>) -> f64 {
        targets.iter().filter_map(|c| self.0.get(c.index())).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkOutcome {
    pub action: ClipId,
    /// Matrix applications (walk steps) or samples consumed.
    pub steps: u64,
}

/// Power iteration from the uniform distribution until `||P pi - pi||_1 <= tol`.
///
/// Chains with a second eigenvalue of modulus one (periodic or reducible) are
/// rejected up front since the limit would depend on the starting vector.
pub fn stationary_distribution(p: &StochasticMatrix, tol: f64) -> Result<ProbabilityVector, WalkError> {
    let n = p.dim();
    if n > 1 && !p.is_rank_one(STOCHASTIC_TOL) {
        let moduli = eigenvalue_moduli(p);
        if moduli[1] >= 1.0 - tol.max(1e-9) {
            return Err(WalkError::DominantEigenvalueTie(moduli[1]));
        }
    }
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..MAX_POWER_ITERATIONS {
        let mut next = p.apply(&v);
        let sum: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= sum);
        let residual: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        v = next;
        if residual <= tol {
            return ProbabilityVector::new(v.iter().map(|x| x.max(0.0)).collect::<Vec<_>>())
                .or_else(|_| ProbabilityVector::from_weights(&v));
        }
    }
    Err(WalkError::NotConverged(MAX_POWER_ITERATIONS))
}

/// Eigenvalue moduli of `P`, sorted in decreasing order.
pub fn eigenvalue_moduli(p: &StochasticMatrix) -> Vec<f64> {
    let n = p.dim();
    let m = DMatrix::from_fn(n, n, |i, j| p.get(i, j));
    let mut moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    moduli
}

/// `delta = 1 - |lambda_2|`. Rank-one chains return exactly one.
pub fn spectral_gap(p: &StochasticMatrix) -> Result<f64, WalkError> {
    if p.dim() == 1 || p.is_rank_one(STOCHASTIC_TOL) {
        return Ok(1.0);
    }
    let moduli = eigenvalue_moduli(p);
    let second = moduli[1];
    let gap = 1.0 - second;
    if gap <= 1e-9 {
        return Err(WalkError::NotErgodic(second));
    }
    Ok(gap.min(1.0))
}

/// `pi` restricted to `targets` and renormalised.
pub fn tailed_distribution(
    pi: &ProbabilityVector,
    targets: &BTreeSet<ClipId>,
) -> Result<ProbabilityVector, WalkError> {
    let mass = pi.mass(targets);
    if !(mass > 0.0) {
        return Err(WalkError::EmptyTail);
    }
    let entries: Vec<f64> = pi
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &x)| if targets.contains(&ClipId::from_index(i)) { x / mass } else { 0.0 })
        .collect();
    ProbabilityVector::from_weights(&entries)
}

/// Standard PS: walk from `start` with one inverse-CDF draw per step and stop
/// at the first action clip.
pub fn standard_ps_deliberate<R: Rng + ?Sized>(
    network: &ClipNetwork,
    start: ClipId,
    rng: &mut R,
) -> Result<WalkOutcome, WalkError> {
    standard_ps_deliberate_with_limit(network, start, DEFAULT_STEP_LIMIT, rng)
}

pub fn standard_ps_deliberate_with_limit<R: Rng + ?Sized>(
    network: &ClipNetwork,
    start: ClipId,
    limit: u64,
    rng: &mut R,
) -> Result<WalkOutcome, WalkError> {
    match network.kind(start) {
        Some(ClipKind::Percept) | Some(ClipKind::Internal) => {}
        _ => return Err(WalkError::InvalidStart(start)),
    }
    let p = network.matrix();
    let mut current = start;
    for step in 1..=limit {
        let next = ClipId::from_index(sample_index(&p.column(current.index()), rng));
        if network.kind(next) == Some(ClipKind::Action) {
            return Ok(WalkOutcome { action: next, steps: step });
        }
        current = next;
    }
    Err(WalkError::StepLimitExceeded(limit))
}

/// Classical RPS on a mixed chain: draw from `pi` until a target is hit.
/// `steps` counts the draws.
pub fn classical_rps_deliberate<R: Rng + ?Sized>(
    pi: &ProbabilityVector,
    targets: &BTreeSet<ClipId>,
    rng: &mut R,
) -> Result<WalkOutcome, WalkError> {
    if !(pi.mass(targets) > 0.0) {
        return Err(WalkError::EmptyTail);
    }
    let mut steps = 0;
    loop {
        steps += 1;
        let clip = ClipId::from_index(sample_index(pi.as_slice(), rng));
        if targets.contains(&clip) {
            return Ok(WalkOutcome { action: clip, steps });
        }
    }
}

/// Classical RPS on a general chain: every attempt restarts at `start`, takes
/// `mixing_steps` walk steps and accepts the final clip if it is a target.
/// `steps` counts walk steps over all attempts.
pub fn reflecting_walk_deliberate<R: Rng + ?Sized>(
    p: &StochasticMatrix,
    start: ClipId,
    mixing_steps: u64,
    targets: &BTreeSet<ClipId>,
    attempt_limit: u64,
    rng: &mut R,
) -> Result<WalkOutcome, WalkError> {
    if start.index() >= p.dim() {
        return Err(WalkError::InvalidStart(start));
    }
    if mixing_steps == 0 {
        return Err(WalkError::InvalidStart(start));
    }
    let mut steps = 0;
    for _ in 0..attempt_limit {
        let mut current = start;
        for _ in 0..mixing_steps {
            current = ClipId::from_index(sample_index(&p.column(current.index()), rng));
        }
        steps += mixing_steps;
        if targets.contains(&current) {
            return Ok(WalkOutcome { action: current, steps });
        }
    }
    Err(WalkError::StepLimitExceeded(steps))
}
