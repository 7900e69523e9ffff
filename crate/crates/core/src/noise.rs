//! Gaussian pulse-angle noise and Monte-Carlo deliberation experiments on
//! the three-clip rank-one network.
//!
//! A trial repeats attempts until a flagged action is measured. Each attempt
//! draws `m` uniformly from `0..=m_eps`, compiles the `4 + 12m` pulse
//! schedule, adds an independent `N(0, sigma^2)` error to every masked pulse
//! angle, evolves `|00>` and measures. Population left in the hiding state
//! counts as a failed attempt.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::classical::ProbabilityVector;
use crate::ecm::ClipId;
use crate::ion::{
    apply_hidden_pair, compile_rank_one_deliberation, hidden_pair_outcomes, rank_one_angles, IonError, NoiseClass,
    PulseSequence,
};
use crate::quantum::m_epsilon;
use crate::rng::{inverse_cdf, stream};
use crate::C64;

pub const DEFAULT_ATTEMPT_LIMIT: u64 = 1_000_000;
pub const DEFAULT_TRIALS: u64 = 10_000;
/// Number of contiguous batches for the standard deviation of the mean.
pub const BATCHES: u64 = 100;

pub const RATIO_GRID: [f64; 4] = [1.0, 2.0, 4.0, 9.0];
pub const SIGMA_GRID: [f64; 3] = [PI / 100.0, PI / 20.0, PI / 10.0];
pub const DISTANCE_SIGMAS: [f64; 6] = [0.0, PI / 100.0, PI / 20.0, PI / 10.0, PI / 2.0, PI];
pub const DISTANCE_EPSILONS: [f64; 2] = [0.05, 0.001];
pub const DISTANCE_RATIOS: [f64; 3] = [9.0, 4.0, 2.0];

/// 40 log-spaced values in `[0.002, 0.5]`, ascending.
pub fn epsilon_grid() -> Vec<f64> {
    log_grid(0.002, 0.5, 40)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            i if i + 1 == n => hi,
            i => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("invalid configuration: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    BadConfig(Vec<ConfigIssue>),
    #[error("no flagged action after {0} attempts")]
    AttemptLimitExceeded(u64),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("fit needs at least three distinct epsilon values")]
    DegenerateDesign,
    #[error(transparent)]
    Ion(#[from] IonError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub sigma: f64,
    pub mask: BTreeSet<NoiseClass>,
}

impl NoiseModel {
    pub fn new(sigma: f64) -> Self {
        NoiseModel { sigma, mask: NoiseClass::ALL.into_iter().collect() }
    }
}

/// Adds `sigma * N(0, 1)` to every masked angle, drawing in pulse order.
pub fn perturb_sequence<R: Rng + ?Sized>(seq: &PulseSequence, model: &NoiseModel, rng: &mut R) -> PulseSequence {
    if model.sigma == 0.0 {
        return seq.clone();
    }
    seq.map_angles(|p| {
        if model.mask.contains(&p.kind().noise_class()) {
            let z: f64 = rng.sample(StandardNormal);
            p.angle() + model.sigma * z
        } else {
            p.angle()
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Flagged stationary mass `pi_1 + pi_2`.
    pub epsilon: f64,
    /// `pi_1 / pi_2`.
    pub ratio: f64,
    pub sigma: f64,
    pub trials: u64,
    pub seed: u64,
    /// Replaces `ceil(1/sqrt(epsilon))`; zero gives the classical baseline.
    pub m_eps_override: Option<u64>,
    pub noise_mask: BTreeSet<NoiseClass>,
    pub attempt_limit: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            epsilon: 0.05,
            ratio: 9.0,
            sigma: 0.0,
            trials: DEFAULT_TRIALS,
            seed: 0,
            m_eps_override: None,
            noise_mask: NoiseClass::ALL.into_iter().collect(),
            attempt_limit: DEFAULT_ATTEMPT_LIMIT,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), NoiseError> {
        let mut issues = Vec::new();
        let mut check = |ok: bool, field: &'static str, message: String| {
            if !ok {
                issues.push(ConfigIssue { field, message });
            }
        };
        check(self.epsilon > 0.0 && self.epsilon < 1.0, "epsilon", format!("{} is not in (0, 1)", self.epsilon));
        check(self.ratio > 0.0 && self.ratio.is_finite(), "ratio", format!("{} is not positive", self.ratio));
        check(self.sigma >= 0.0 && self.sigma.is_finite(), "sigma", format!("{} is negative", self.sigma));
        check(self.trials >= 1, "trials", "must be at least 1".into());
        check(self.attempt_limit >= 1, "attempt_limit", "must be at least 1".into());
        if issues.is_empty() { Ok(()) } else { Err(NoiseError::BadConfig(issues)) }
    }

    /// `(epsilon r / (1 + r), epsilon / (1 + r), 1 - epsilon)`.
    pub fn stationary(&self) -> ProbabilityVector {
        let r = self.ratio;
        let p1 = self.epsilon * r / (1.0 + r);
        let p2 = self.epsilon / (1.0 + r);
        ProbabilityVector::from_weights(&[p1, p2, 1.0 - self.epsilon]).expect("valid configuration")
    }

    /// Tailed distribution over the two flagged actions.
    pub fn target_tail(&self) -> [f64; 2] {
        [self.ratio / (1.0 + self.ratio), 1.0 / (1.0 + self.ratio)]
    }

    pub fn m_eps(&self) -> u64 {
        self.m_eps_override.unwrap_or_else(|| m_epsilon(self.epsilon))
    }

    pub fn noise(&self) -> NoiseModel {
        NoiseModel { sigma: self.sigma, mask: self.noise_mask.clone() }
    }

    /// Stream label covering every field that changes the trial process.
    pub fn stream_label(&self) -> String {
        let mask: String = self.noise_mask.iter().map(|c| c.token()).collect::<Vec<_>>().join("+");
        format!(
            "trial/{:016x}/{:016x}/{:016x}/{}/{}",
            self.epsilon.to_bits(),
            self.ratio.to_bits(),
            self.sigma.to_bits(),
            self.m_eps_override.map_or("auto".to_string(), |m| m.to_string()),
            mask
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub action: ClipId,
    pub n_u: u64,
    pub attempts: u64,
}

/// Compiled schedules for every `m` of one configuration.
#[derive(Debug, Clone)]
pub struct TrialPlan {
    sequences: Vec<PulseSequence>,
    noise: NoiseModel,
    attempt_limit: u64,
}

impl TrialPlan {
    pub fn new(config: &ExperimentConfig) -> Result<Self, NoiseError> {
        config.validate()?;
        let (t1, t2) = rank_one_angles(&config.stationary())?;
        let flags: BTreeSet<ClipId> = [ClipId(1), ClipId(2)].into();
        let sequences = (0..=config.m_eps())
            .map(|m| compile_rank_one_deliberation(t1, t2, &flags, m))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TrialPlan { sequences, noise: config.noise(), attempt_limit: config.attempt_limit })
    }

    pub fn m_eps(&self) -> u64 {
        self.sequences.len() as u64 - 1
    }

    /// Outcome probabilities `(c1, c2, c3, hidden)` of one noiseless attempt.
    pub fn ideal_outcomes(&self, m: u64) -> [f64; 4] {
        hidden_pair_outcomes(&apply_hidden_pair(&self.sequences[m as usize], ground()).expect("hidden-pair pulses"))
    }

    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TrialRecord, NoiseError> {
        let m_eps = self.m_eps();
        let mut n_u = 0;
        for attempts in 1..=self.attempt_limit {
            let m = if m_eps == 0 { 0 } else { rng.random_range(0..=m_eps) };
            n_u += 2 * m + 1;
            let seq = perturb_sequence(&self.sequences[m as usize], &self.noise, rng);
            let probs = hidden_pair_outcomes(&apply_hidden_pair(&seq, ground())?);
            let u: f64 = rng.random();
            let k = inverse_cdf(&probs, u);
            if k < 2 {
                return Ok(TrialRecord { action: ClipId::from_index(k), n_u, attempts });
            }
        }
        Err(NoiseError::AttemptLimitExceeded(self.attempt_limit))
    }
}

fn ground() -> [C64; 5] {
    let mut s = [C64::new(0.0, 0.0); 5];
    s[0] = C64::new(1.0, 0.0);
    s
}

pub fn run_trial<R: Rng + ?Sized>(config: &ExperimentConfig, rng: &mut R) -> Result<TrialRecord, NoiseError> {
    TrialPlan::new(config)?.run(rng)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentStats {
    pub epsilon: f64,
    pub ratio: f64,
    pub sigma: f64,
    pub trials: u64,
    pub mean_nu: f64,
    pub std_nu: f64,
    /// Standard deviation of the means of `min(100, trials)` contiguous batches.
    pub std_mean_nu: f64,
    pub n1: u64,
    pub n2: u64,
    pub mean_attempts: f64,
}

impl ExperimentStats {
    pub fn aggregate(config: &ExperimentConfig, records: &[TrialRecord]) -> Self {
        let trials = records.len() as u64;
        let nu: Vec<f64> = records.iter().map(|r| r.n_u as f64).collect();
        let mean_nu = mean(&nu);
        let batches = BATCHES.min(trials).max(1) as usize;
        let batch_means: Vec<f64> = (0..batches)
            .map(|b| mean(&nu[b * nu.len() / batches..(b + 1) * nu.len() / batches]))
            .collect();
        let attempts: Vec<f64> = records.iter().map(|r| r.attempts as f64).collect();
        ExperimentStats {
            epsilon: config.epsilon,
            ratio: config.ratio,
            sigma: config.sigma,
            trials,
            mean_nu,
            std_nu: sample_std(&nu),
            std_mean_nu: sample_std(&batch_means),
            n1: records.iter().filter(|r| r.action == ClipId(1)).count() as u64,
            n2: records.iter().filter(|r| r.action == ClipId(2)).count() as u64,
            mean_attempts: mean(&attempts),
        }
    }

    /// `N_1 / N_2` (infinite when `N_2 = 0`).
    pub fn ratio_empirical(&self) -> f64 {
        self.n1 as f64 / self.n2 as f64
    }

    pub fn empirical_tail(&self) -> [f64; 2] {
        let t = self.trials as f64;
        [self.n1 as f64 / t, self.n2 as f64 / t]
    }

    /// Distance between the target tail and the observed output frequencies.
    pub fn distance_to_target(&self) -> f64 {
        let r = self.ratio;
        statistical_distance(&[r / (1.0 + r), 1.0 / (1.0 + r)], &self.empirical_tail()).expect("two entries")
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn sample_std(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

/// Runs `config.trials` trials in parallel; trial `i` uses its own stream
/// `(seed, label, i)` and records are aggregated in index order, so the
/// result does not depend on the thread count.
pub fn monte_carlo(config: &ExperimentConfig) -> Result<ExperimentStats, NoiseError> {
    let plan = TrialPlan::new(config)?;
    let label = config.stream_label();
    let records = (0..config.trials)
        .into_par_iter()
        .map(|i| plan.run(&mut stream(config.seed, &label, i)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExperimentStats::aggregate(config, &records))
}

/// Expected `N_U` per trial at `sigma = 0`:
/// `(m_eps + 1) / mean_m sin^2((2m + 1) theta)` with `sin theta = sqrt(epsilon)`.
pub fn analytic_mean_nu(epsilon: f64, m_eps: u64) -> f64 {
    let theta = epsilon.sqrt().asin();
    let success: f64 =
        (0..=m_eps).map(|m| ((2 * m + 1) as f64 * theta).sin().powi(2)).sum::<f64>() / (m_eps + 1) as f64;
    (m_eps + 1) as f64 / success
}

/// `(1/2) sum |p_i - q_i|`.
pub fn statistical_distance(p: &[f64], q: &[f64]) -> Result<f64, NoiseError> {
    if p.len() != q.len() {
        return Err(NoiseError::LengthMismatch(p.len(), q.len()));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingModel {
    InverseSqrt,
    Inverse,
}

impl ScalingModel {
    pub fn regressor(self, epsilon: f64) -> f64 {
        match self {
            ScalingModel::InverseSqrt => 1.0 / epsilon.sqrt(),
            ScalingModel::Inverse => 1.0 / epsilon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub a: f64,
    pub b: f64,
    pub sse: f64,
}

/// Ordinary least squares of `y` on `a + b g(epsilon)`.
pub fn fit_scaling(points: &[(f64, f64)], model: ScalingModel) -> Result<ScalingFit, NoiseError> {
    let distinct: BTreeSet<u64> = points.iter().map(|p| p.0.to_bits()).collect();
    if distinct.len() < 3 {
        return Err(NoiseError::DegenerateDesign);
    }
    let g: Vec<f64> = points.iter().map(|p| model.regressor(p.0)).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (gm, ym) = (mean(&g), mean(&y));
    let sxx: f64 = g.iter().map(|x| (x - gm).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(NoiseError::DegenerateDesign);
    }
    let sxy: f64 = g.iter().zip(&y).map(|(x, v)| (x - gm) * (v - ym)).sum();
    let b = sxy / sxx;
    let a = ym - b * gm;
    let sse = g.iter().zip(&y).map(|(x, v)| (v - a - b * x).powi(2)).sum();
    Ok(ScalingFit { a, b, sse })
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn scaling_csv(rows: &[ExperimentStats]) -> String {
    let mut out = String::from("epsilon,sigma,trials,mean_nu,std_mean_nu\n");
    for r in rows {
        out += &format!(
            "{},{},{},{},{}\n",
            fmt_f64(r.epsilon),
            fmt_f64(r.sigma),
            r.trials,
            fmt_f64(r.mean_nu),
            fmt_f64(r.std_mean_nu)
        );
    }
    out
}

pub fn ratios_csv(rows: &[ExperimentStats]) -> String {
    let mut out = String::from("epsilon,ratio_target,sigma,n1,n2,ratio_empirical\n");
    for r in rows {
        out += &format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(r.epsilon),
            fmt_f64(r.ratio),
            fmt_f64(r.sigma),
            r.n1,
            r.n2,
            fmt_f64(r.ratio_empirical())
        );
    }
    out
}

pub fn distance_csv(rows: &[ExperimentStats]) -> String {
    let mut out = String::from("epsilon,ratio_target,sigma,statistical_distance\n");
    for r in rows {
        out += &format!(
            "{},{},{},{}\n",
            fmt_f64(r.epsilon),
            fmt_f64(r.ratio),
            fmt_f64(r.sigma),
            fmt_f64(r.distance_to_target())
        );
    }
    out
}

/// Rows of `(epsilon, quantum stats, classical stats)`.
pub fn compare_csv(rows: &[(ExperimentStats, ExperimentStats)]) -> String {
    let mut out = String::from("epsilon,mean_nu_quantum,mean_nu_classical\n");
    for (q, c) in rows {
        out += &format!("{},{},{}\n", fmt_f64(q.epsilon), fmt_f64(q.mean_nu), fmt_f64(c.mean_nu));
    }
    out
}
