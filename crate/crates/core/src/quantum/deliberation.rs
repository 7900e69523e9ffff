use std::collections::BTreeSet;

use ndarray::Array1;
use rand::Rng;

use super::{controlization_angles, pad_distribution, probability_unitary, AroApplier, ClipEncoding, QuantumError, SzegedyWalk};
use crate::classical::{ProbabilityVector, WalkOutcome};
use crate::ecm::{ClipId, FlagSet};
use crate::linalg::{adjoint, diagonal, kron, identity, reflection_about_zero, CMatrix, CVector, ONE, ZERO};
use crate::rng::sample_index;
use crate::C64;

/// `ceil(1 / sqrt(epsilon))`.
pub fn m_epsilon(epsilon: f64) -> u64 {
    ((1.0 / epsilon.sqrt()) - 1e-9).ceil().max(0.0) as u64
}

/// Diagonal reflection on register I: `+1` on every basis state of a target
/// clip, `-1` elsewhere.
pub fn ref_actions(encoding: &ClipEncoding, targets: &BTreeSet<ClipId>) -> Result<CMatrix, QuantumError> {
    if targets.is_empty() {
        return Err(QuantumError::EmptyTargets);
    }
    let mut signs = vec![-ONE; encoding.dim()];
    for &t in targets {
        for i in encoding.basis_states(t)? {
            signs[i] = ONE;
        }
    }
    Ok(diagonal(&signs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeliberationOutcome {
    pub action: ClipId,
    /// Operator calls over all attempts.
    pub calls: u64,
    /// Measure-and-retry rounds.
    pub attempts: u64,
}

impl From<DeliberationOutcome> for WalkOutcome {
    fn from(o: DeliberationOutcome) -> Self {
        WalkOutcome { action: o.action, steps: o.calls }
    }
}

fn flagged_mass(dist: &[f64], targets: &BTreeSet<ClipId>) -> f64 {
    targets.iter().filter_map(|c| dist.get(c.index())).sum()
}

fn sample_attempts<R: Rng + ?Sized>(
    schedule: &[u64],
    distributions: &[Vec<f64>],
    targets: &BTreeSet<ClipId>,
    cost: impl Fn(u64) -> u64,
    rng: &mut R,
) -> Result<DeliberationOutcome, QuantumError> {
    if distributions.iter().all(|d| flagged_mass(d, targets) <= 0.0) {
        return Err(QuantumError::Unreachable);
    }
    let mut calls = 0;
    let mut attempts = 0;
    loop {
        attempts += 1;
        let k = if schedule.len() > 1 { rng.random_range(0..schedule.len()) } else { 0 };
        calls += cost(schedule[k]);
        let action = ClipId::from_index(sample_index(&distributions[k], rng));
        if targets.contains(&action) {
            return Ok(DeliberationOutcome { action, calls, attempts });
        }
    }
}

/// Deliberation on a rank-one chain: each attempt draws `m` from the
/// schedule, prepares `(U D_0 U^dagger ref)^m U|0>` on register I and
/// measures in the clip basis. One attempt costs `2m + 1` calls of `U`/`U^dagger`.
#[derive(Debug, Clone)]
pub struct RankOneDeliberation {
    targets: BTreeSet<ClipId>,
    epsilon: f64,
    schedule: Vec<u64>,
    distributions: Vec<Vec<f64>>,
}

impl RankOneDeliberation {
    /// Uniform schedule on `0..=m_eps`.
    pub fn new(pi: &ProbabilityVector, flags: &FlagSet, m_eps: u64) -> Result<Self, QuantumError> {
        Self::with_schedule(pi, flags, (0..=m_eps).collect())
    }

    /// Every attempt uses the same `m`.
    pub fn fixed(pi: &ProbabilityVector, flags: &FlagSet, m: u64) -> Result<Self, QuantumError> {
        Self::with_schedule(pi, flags, vec![m])
    }

    fn with_schedule(pi: &ProbabilityVector, flags: &FlagSet, schedule: Vec<u64>) -> Result<Self, QuantumError> {
        let targets = flags.flagged().clone();
        let epsilon = pi.mass(&targets);
        if let Some(&c) = targets.iter().find(|c| c.index() >= pi.len()) {
            return Err(QuantumError::UnknownClip(c));
        }
        if !(epsilon > 0.0) {
            return Err(QuantumError::EmptyTail);
        }
        let max_m = schedule.iter().copied().max().unwrap_or(0);
        let all = rank_one_distributions(pi, &targets, max_m)?;
        let distributions = schedule.iter().map(|&m| all[m as usize].clone()).collect();
        Ok(RankOneDeliberation { targets, epsilon, schedule, distributions })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn schedule(&self) -> &[u64] {
        &self.schedule
    }

    /// Clip distribution of one attempt for each schedule entry.
    pub fn distributions(&self) -> &[Vec<f64>] {
        &self.distributions
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DeliberationOutcome, QuantumError> {
        sample_attempts(&self.schedule, &self.distributions, &self.targets, |m| 2 * m + 1, rng)
    }
}

/// Clip-basis distributions after `m = 0..=max_m` rank-one iterations.
fn rank_one_distributions(
    pi: &ProbabilityVector,
    targets: &BTreeSet<ClipId>,
    max_m: u64,
) -> Result<Vec<Vec<f64>>, QuantumError> {
    let encoding = ClipEncoding::new(pi.len());
    let u = probability_unitary(&controlization_angles(&pad_distribution(pi.as_slice(), &encoding))?);
    let reflect = u.dot(&reflection_about_zero(encoding.dim())).dot(&adjoint(&u));
    let step = reflect.dot(&ref_actions(&encoding, targets)?);
    let mut psi: CVector = u.column(0).to_owned();
    let mut out = Vec::with_capacity(max_m as usize + 1);
    for m in 0..=max_m {
        if m > 0 {
            psi = step.dot(&psi);
        }
        let probs: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
        out.push(encoding.decode_distribution(&probs));
    }
    Ok(out)
}

/// Rank-one deliberation with the uniform schedule on `0..=m_eps`.
pub fn rank_one_deliberate<R: Rng + ?Sized>(
    pi: &ProbabilityVector,
    flags: &FlagSet,
    m_eps: u64,
    rng: &mut R,
) -> Result<WalkOutcome, QuantumError> {
    Ok(RankOneDeliberation::new(pi, flags, m_eps)?.sample(rng)?.into())
}

/// Deliberation on a general reversible chain: prepare `|0>_Aux |pi'>`,
/// alternate the action reflection with the approximate reflection `m`
/// times and measure register I. Calls count applications of `U_P`,
/// `V_P` and their adjoints, one for the preparation and four per walk step.
#[derive(Debug, Clone)]
pub struct GroverDeliberation {
    targets: BTreeSet<ClipId>,
    epsilon: f64,
    schedule: Vec<u64>,
    distributions: Vec<Vec<f64>>,
    calls_per_iteration: u64,
}

impl GroverDeliberation {
    pub fn new(walk: &SzegedyWalk, flags: &FlagSet, n: usize, m_eps: u64) -> Result<Self, QuantumError> {
        let encoding = *walk.encoding();
        let targets = flags.flagged().clone();
        if let Some(&c) = targets.iter().find(|c| c.index() >= encoding.clips()) {
            return Err(QuantumError::UnknownClip(c));
        }
        let pi = encoding.decode_distribution(walk.padded_stationary());
        let epsilon = flagged_mass(&pi, &targets);
        if !(epsilon > 0.0) {
            return Err(QuantumError::EmptyTail);
        }
        let d = encoding.dim();
        let applier = AroApplier::new(walk.w(), n);
        let ref_i = kron(&ref_actions(&encoding, &targets)?, &identity(d));
        let signs: Vec<C64> = (0..d * d).map(|r| ref_i[[r, r]]).collect();

        let mut state = Array1::from_elem(applier.total_dim(), ZERO);
        for (r, z) in walk.stationary_state().iter().enumerate() {
            state[r] = *z;
        }
        let mut distributions = Vec::with_capacity(m_eps as usize + 1);
        for m in 0..=m_eps {
            if m > 0 {
                for (r, z) in state.iter_mut().enumerate() {
                    *z *= signs[r % (d * d)];
                }
                state = applier.apply(&state);
            }
            let mut probs = vec![0.0; d];
            for (r, z) in state.iter().enumerate() {
                probs[(r % (d * d)) / d] += z.norm_sqr();
            }
            distributions.push(encoding.decode_distribution(&probs));
        }
        Ok(GroverDeliberation {
            targets,
            epsilon,
            schedule: (0..=m_eps).collect(),
            distributions,
            calls_per_iteration: 4 * applier.walk_calls(),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn distributions(&self) -> &[Vec<f64>] {
        &self.distributions
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DeliberationOutcome, QuantumError> {
        let per = self.calls_per_iteration;
        sample_attempts(&self.schedule, &self.distributions, &self.targets, |m| 1 + per * m, rng)
    }
}

/// Grover-like deliberation with `m_eps = ceil(1/sqrt(epsilon))` taken from
/// the flagged stationary mass.
pub fn grover_deliberate<R: Rng + ?Sized>(
    walk: &SzegedyWalk,
    flags: &FlagSet,
    n: usize,
    rng: &mut R,
) -> Result<WalkOutcome, QuantumError> {
    let encoding = walk.encoding();
    let pi = encoding.decode_distribution(walk.padded_stationary());
    let epsilon = flagged_mass(&pi, flags.flagged());
    if !(epsilon > 0.0) {
        return Err(QuantumError::EmptyTail);
    }
    Ok(GroverDeliberation::new(walk, flags, n, m_epsilon(epsilon))?.sample(rng)?.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecm::StochasticMatrix;
    use crate::linalg::max_abs_diff;
    use crate::quantum::build_walk_operator;
    use crate::rng::stream;

    fn set(v: &[usize]) -> BTreeSet<ClipId> {
        v.iter().map(|&i| ClipId(i)).collect()
    }

    fn flags(actions: &[usize], flagged: &[usize]) -> FlagSet {
        FlagSet::with_flagged(set(actions), set(flagged)).unwrap()
    }

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn m_epsilon_values() {
        assert_eq!(m_epsilon(0.25), 2);
        assert_eq!(m_epsilon(0.04), 5);
        assert_eq!(m_epsilon(0.1), 4);
        assert_eq!(m_epsilon(1.0), 1);
    }

    #[test]
    fn action_reflection_examples() {
        let e = ClipEncoding::new(3);
        let r = ref_actions(&e, &set(&[1, 2])).unwrap();
        let expect = diagonal(&[ONE, ONE, -ONE, -ONE]);
        assert_eq!(r, expect);
        // Z on the first qubit, exp(-i pi/2 Z) ⊗ 1 = diag(-i,-i,i,i) = -i diag(1,1,-1,-1).
        let pulse = diagonal(&[-crate::linalg::I, -crate::linalg::I, crate::linalg::I, crate::linalg::I]);
        assert!(max_abs_diff(&r.mapv(|z| z * -crate::linalg::I), &pulse) < 1e-15);
        assert_eq!(ref_actions(&e, &set(&[1, 2, 3])).unwrap(), identity(4));
        assert_eq!(ref_actions(&e, &set(&[3])).unwrap(), diagonal(&[-ONE, -ONE, ONE, ONE]));
        assert_eq!(ref_actions(&e, &BTreeSet::new()), Err(QuantumError::EmptyTargets));
    }

    #[test]
    fn one_iteration_is_certain_at_quarter_mass() {
        let d = RankOneDeliberation::fixed(&pv(&[0.125, 0.125, 0.75]), &flags(&[1, 2, 3], &[1, 2]), 1).unwrap();
        let dist = &d.distributions()[0];
        assert!((dist[0] + dist[1] - 1.0).abs() < 1e-12);
        assert!((dist[0] - 0.5).abs() < 1e-12);
        let mut rng = stream(1, "r1", 0);
        for _ in 0..100 {
            let o = d.sample(&mut rng).unwrap();
            assert_eq!((o.calls, o.attempts), (3, 1));
        }
    }

    #[test]
    fn flagged_probability_follows_grover_angle() {
        let pi = pv(&[0.03, 0.01, 0.5, 0.46]);
        let eps: f64 = 0.04;
        let theta = eps.sqrt().asin();
        let d = RankOneDeliberation::new(&pi, &flags(&[1, 2, 3, 4], &[1, 2]), 7).unwrap();
        for (m, dist) in d.distributions().iter().enumerate() {
            let success = ((2 * m + 1) as f64 * theta).sin().powi(2);
            assert!((dist[0] + dist[1] - success).abs() < 1e-12);
            assert!((dist[0] / (dist[0] + dist[1]) - 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_iterations_is_plain_sampling() {
        let pi = pv(&[0.045, 0.005, 0.95]);
        let d = RankOneDeliberation::new(&pi, &flags(&[1, 2, 3], &[1, 2]), 0).unwrap();
        for (a, b) in d.distributions()[0].iter().zip(pi.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
        let mut rng = stream(3, "r0", 0);
        let o = d.sample(&mut rng).unwrap();
        assert_eq!(o.calls, o.attempts);
    }

    #[test]
    fn empty_tail_is_rejected() {
        let pi = pv(&[0.0, 0.0, 1.0]);
        assert_eq!(
            RankOneDeliberation::new(&pi, &flags(&[1, 2, 3], &[1, 2]), 3).unwrap_err(),
            QuantumError::EmptyTail
        );
    }

    #[test]
    fn grover_on_rank_one_chain_matches_fast_path() {
        let pi = pv(&[0.045, 0.005, 0.95]);
        let f = flags(&[1, 2, 3], &[1, 2]);
        let walk = build_walk_operator(&StochasticMatrix::rank_one(&pi), None).unwrap();
        let general = GroverDeliberation::new(&walk, &f, 1, 5).unwrap();
        let fast = RankOneDeliberation::new(&pi, &f, 5).unwrap();
        for (a, b) in general.distributions().iter().zip(fast.distributions()) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }
}
