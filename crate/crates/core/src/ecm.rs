//! Episodic and compositional memory: clips, stochastic matrices, flags and
//! the h-value learning rule.

use std::collections::BTreeSet;
use std::fmt;

use ndarray::Array2;
use thiserror::Error;

use crate::classical::ProbabilityVector;

/// Column sums of a stochastic matrix must be within this of one.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// 1-based clip identifier, unique and contiguous within a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClipId(pub usize);

impl ClipId {
    /// 0-based position in matrices and vectors.
    pub fn index(self) -> usize {
        self.0 - 1
    }

    pub fn from_index(index: usize) -> Self {
        ClipId(index + 1)
    }
}

impl fmt::Display for ClipId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClipKind {
    Percept,
    Action,
    Internal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clip {
    id: ClipId,
    kind: ClipKind,
    pub label: String,
}

impl Clip {
    pub fn new(id: usize, kind: ClipKind, label: impl Into<String>) -> Self {
        Clip { id: ClipId(id), kind, label: label.into() }
    }

    pub fn id(&self) -> ClipId {
        self.id
    }

    pub fn kind(&self) -> ClipKind {
        self.kind
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EcmError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("entry ({row}, {col}) = {value} is outside [0, 1]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },
    #[error("column {0} sums to {1}, not 1")]
    NonStochasticColumn(usize, f64),
    #[error("network has no action clips")]
    NoActionClips,
    #[error("clip ids must be contiguous from 1; found {0} at position {1}")]
    NonContiguousIds(usize, usize),
    #[error("stationary entry {0} is zero")]
    ZeroStationaryEntry(ClipId),
    #[error("{0} is not an action clip")]
    NotAnAction(ClipId),
    #[error("unknown percept {percept} or action {action}")]
    UnknownPerceptOrAction { percept: usize, action: usize },
    #[error("reward must be non-negative, got {0}")]
    NegativeReward(f64),
    #[error("flag set must be a non-empty subset of the action clips")]
    InvalidFlags,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Column-stochastic transition matrix `P = [p_ij]`; column `j` is the
/// distribution of destinations from source clip `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    entries: Array2<f64>,
}

impl StochasticMatrix {
    pub fn new(entries: Array2<f64>) -> Result<Self, EcmError> {
        let errors = Self::check(&entries);
        match errors.into_iter().next() {
            Some(e) => Err(e),
            None => Ok(StochasticMatrix { entries }),
        }
    }

    fn check(entries: &Array2<f64>) -> Vec<EcmError> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return vec![EcmError::NotSquare { rows, cols }];
        }
        let mut errors = Vec::new();
        for ((row, col), &value) in entries.indexed_iter() {
            if !(0.0..=1.0).contains(&value) {
                errors.push(EcmError::EntryOutOfRange { row: row + 1, col: col + 1, value });
            }
        }
        for (j, column) in entries.columns().into_iter().enumerate() {
            let sum: f64 = column.sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                errors.push(EcmError::NonStochasticColumn(j + 1, sum));
            }
        }
        errors
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self, EcmError> {
        let n = columns.len();
        let mut entries = Array2::zeros((n, n));
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(EcmError::DimensionMismatch { expected: n, found: col.len() });
            }
            for (i, &p) in col.iter().enumerate() {
                entries[[i, j]] = p;
            }
        }
        Self::new(entries)
    }

    /// Rank-one chain: every column equals `pi`.
    pub fn rank_one(pi: &ProbabilityVector) -> Self {
        let n = pi.len();
        let entries = Array2::from_shape_fn((n, n), |(i, _)| pi.as_slice()[i]);
        StochasticMatrix { entries }
    }

    /// Rescales every column to sum to one. Columns with zero mass are an
    /// error, as are negative entries.
    pub fn renormalized(raw: Array2<f64>) -> Result<Self, EcmError> {
        let mut entries = raw;
        for (j, mut column) in entries.columns_mut().into_iter().enumerate() {
            let sum: f64 = column.sum();
            if sum <= 0.0 || column.iter().any(|&x| x < 0.0) {
                return Err(EcmError::NonStochasticColumn(j + 1, sum));
            }
            column.mapv_inplace(|x| x / sum);
        }
        Self::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `p_ij`: probability of moving to clip `i` from clip `j` (0-based).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[[i, j]]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.entries.column(j).to_vec()
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    /// `P v`
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.entries.dot(&ndarray::ArrayView1::from(v)).to_vec()
    }

    pub fn is_rank_one(&self, tol: f64) -> bool {
        let first = self.entries.column(0);
        self.entries
            .columns()
            .into_iter()
            .all(|c| c.iter().zip(first.iter()).all(|(a, b)| (a - b).abs() <= tol))
    }

    /// Detailed balance `p_ij pi_j = p_ji pi_i` for all pairs.
    pub fn satisfies_detailed_balance(&self, pi: &ProbabilityVector, tol: f64) -> bool {
        let n = self.dim();
        let pi = pi.as_slice();
        (0..n).all(|i| (0..n).all(|j| (self.get(i, j) * pi[j] - self.get(j, i) * pi[i]).abs() <= tol))
    }
}

/// A validated clip network: the transition matrix plus clip metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ClipNetwork {
    clips: Vec<Clip>,
    matrix: StochasticMatrix,
}

impl ClipNetwork {
    pub fn clips(&self) -> &[Clip] {
        &self.clips
    }

    pub fn matrix(&self) -> &StochasticMatrix {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.clips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clips.is_empty()
    }

    pub fn kind(&self, id: ClipId) -> Option<ClipKind> {
        self.clips.get(id.index()).map(Clip::kind)
    }

    pub fn actions(&self) -> BTreeSet<ClipId> {
        self.clips.iter().filter(|c| c.kind == ClipKind::Action).map(Clip::id).collect()
    }

    /// Parses the plain-text network format:
    ///
    /// ```text
    /// N
    /// p_11 p_12 ... p_1N
    /// ...
    /// p_N1 ... p_NN
    /// <action ids>
    /// ```
    ///
    /// Rows are destinations, so every column must sum to one. Clips not
    /// listed as actions are loaded as internal clips. Blank lines and
    /// trailing content are rejected.
    pub fn parse(text: &str) -> Result<Self, Vec<EcmError>> {
        let lines: Vec<&str> = text.lines().collect();
        let parse_err = |line: usize, message: String| vec![EcmError::Parse { line, message }];

        let header = lines.first().ok_or_else(|| parse_err(1, "missing dimension line".into()))?;
        let n: usize = header
            .trim()
            .parse()
            .map_err(|_| parse_err(1, format!("expected clip count, found {header:?}")))?;
        if n == 0 {
            return Err(parse_err(1, "clip count must be positive".into()));
        }
        if lines.len() != n + 2 {
            return Err(parse_err(
                lines.len().min(n + 2),
                format!("expected {} lines, found {}", n + 2, lines.len()),
            ));
        }
        let mut entries = Array2::zeros((n, n));
        for i in 0..n {
            let line_no = i + 2;
            let values: Vec<&str> = lines[i + 1].split_whitespace().collect();
            if values.len() != n {
                return Err(parse_err(line_no, format!("expected {n} values, found {}", values.len())));
            }
            for (j, token) in values.iter().enumerate() {
                entries[[i, j]] = token
                    .parse::<f64>()
                    .map_err(|_| parse_err(line_no, format!("invalid number {token:?}")))?;
            }
        }
        let mut actions = BTreeSet::new();
        for token in lines[n + 1].split_whitespace() {
            let id: usize = token
                .parse()
                .map_err(|_| parse_err(n + 2, format!("invalid action id {token:?}")))?;
            if id == 0 || id > n {
                return Err(parse_err(n + 2, format!("action id {id} outside 1..={n}")));
            }
            actions.insert(id);
        }
        let clips = (1..=n)
            .map(|id| {
                if actions.contains(&id) {
                    Clip::new(id, ClipKind::Action, format!("a{id}"))
                } else {
                    Clip::new(id, ClipKind::Internal, format!("c{id}"))
                }
            })
            .collect();
        validate_network(entries, clips)
    }

    pub fn to_text(&self) -> String {
        let n = self.len();
        let mut out = format!("{n}\n");
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| format!("{:.16e}", self.matrix.get(i, j))).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        let actions: Vec<String> = self.actions().iter().map(|a| a.0.to_string()).collect();
        out.push_str(&actions.join(" "));
        out.push('\n');
        out
    }
}

/// Checks a transition matrix against its clip list, collecting every
/// violation rather than stopping at the first.
pub fn validate_network(entries: Array2<f64>, clips: Vec<Clip>) -> Result<ClipNetwork, Vec<EcmError>> {
    let mut errors = Vec::new();
    let (rows, cols) = entries.dim();
    if rows != cols {
        errors.push(EcmError::NotSquare { rows, cols });
    } else if rows != clips.len() {
        errors.push(EcmError::DimensionMismatch { expected: clips.len(), found: rows });
    }
    for (pos, clip) in clips.iter().enumerate() {
        if clip.id.0 != pos + 1 {
            errors.push(EcmError::NonContiguousIds(clip.id.0, pos + 1));
        }
    }
    if !clips.iter().any(|c| c.kind == ClipKind::Action) {
        errors.push(EcmError::NoActionClips);
    }
    if rows == cols {
        errors.extend(StochasticMatrix::check(&entries));
    }
    if errors.is_empty() {
        Ok(ClipNetwork { clips, matrix: StochasticMatrix { entries } })
    } else {
        Err(errors)
    }
}

/// Time-reversed chain `p*_ij = p_ji pi_i / pi_j`.
///
/// `pi` must be the stationary distribution of `p`. Column sums of the raw
/// formula deviate from one by the stationarity residual of `pi`; deviations
/// above `1e-9` are reported as [`EcmError::NonStochasticColumn`], smaller
/// ones are rescaled away.
pub fn time_reversed(p: &StochasticMatrix, pi: &ProbabilityVector) -> Result<StochasticMatrix, EcmError> {
    let n = p.dim();
    if pi.len() != n {
        return Err(EcmError::DimensionMismatch { expected: n, found: pi.len() });
    }
    let pi = pi.as_slice();
    if let Some(i) = pi.iter().position(|&x| x <= 0.0) {
        return Err(EcmError::ZeroStationaryEntry(ClipId::from_index(i)));
    }
    let mut entries = Array2::from_shape_fn((n, n), |(i, j)| p.get(j, i) * pi[i] / pi[j]);
    for (j, mut column) in entries.columns_mut().into_iter().enumerate() {
        let sum = column.sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(EcmError::NonStochasticColumn(j + 1, sum));
        }
        column.mapv_inplace(|x| (x / sum).min(1.0));
    }
    StochasticMatrix::new(entries)
}

/// Flags on action clips. Never empty: removing the last flag restores all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagSet {
    actions: BTreeSet<ClipId>,
    flagged: BTreeSet<ClipId>,
}

impl FlagSet {
    /// All actions flagged, the initial state of every percept.
    pub fn all(actions: BTreeSet<ClipId>) -> Result<Self, EcmError> {
        if actions.is_empty() {
            return Err(EcmError::NoActionClips);
        }
        Ok(FlagSet { flagged: actions.clone(), actions })
    }

    pub fn with_flagged(actions: BTreeSet<ClipId>, flagged: BTreeSet<ClipId>) -> Result<Self, EcmError> {
        if flagged.is_empty() || !flagged.is_subset(&actions) {
            return Err(EcmError::InvalidFlags);
        }
        Ok(FlagSet { actions, flagged })
    }

    pub fn flagged(&self) -> &BTreeSet<ClipId> {
        &self.flagged
    }

    pub fn actions(&self) -> &BTreeSet<ClipId> {
        &self.actions
    }

    pub fn contains(&self, id: ClipId) -> bool {
        self.flagged.contains(&id)
    }

    /// Bit `i - 1` set for every flagged clip `c_i`.
    pub fn bitmask(&self) -> u64 {
        self.flagged.iter().fold(0, |m, c| m | (1u64 << c.index()))
    }

    /// Rewarded actions keep their flag; an unrewarded action loses it, and
    /// if that empties the set every action is flagged again.
    pub fn update(&self, chosen: ClipId, rewarded: bool) -> Result<FlagSet, EcmError> {
        if !self.actions.contains(&chosen) {
            return Err(EcmError::NotAnAction(chosen));
        }
        if rewarded {
            return Ok(self.clone());
        }
        let mut flagged = self.flagged.clone();
        flagged.remove(&chosen);
        if flagged.is_empty() {
            flagged = self.actions.clone();
        }
        Ok(FlagSet { actions: self.actions.clone(), flagged })
    }
}

pub fn flag_update(flags: &FlagSet, chosen: ClipId, rewarded: bool) -> Result<FlagSet, EcmError> {
    flags.update(chosen, rewarded)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningParams {
    /// Reward scale.
    pub lambda: f64,
    /// Forgetting rate towards the floor.
    pub gamma: f64,
}

impl Default for LearningParams {
    fn default() -> Self {
        LearningParams { lambda: 1.0, gamma: 0.0 }
    }
}

/// Per-(percept, action) weights of a two-layered network. Percepts and
/// actions are addressed by 0-based position.
#[derive(Debug, Clone, PartialEq)]
pub struct HValues {
    h: Vec<Vec<f64>>,
    floor: f64,
}

impl HValues {
    pub fn uniform(percepts: usize, actions: usize, floor: f64) -> Self {
        HValues { h: vec![vec![floor; actions]; percepts], floor }
    }

    /// Explicit weights; every entry is raised to at least `floor`.
    pub fn from_rows(rows: Vec<Vec<f64>>, floor: f64) -> Self {
        let h = rows.into_iter().map(|r| r.into_iter().map(|x| x.max(floor)).collect()).collect();
        HValues { h, floor }
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn get(&self, percept: usize, action: usize) -> Option<f64> {
        self.h.get(percept).and_then(|row| row.get(action)).copied()
    }

    pub fn row(&self, percept: usize) -> &[f64] {
        &self.h[percept]
    }

    /// `p_a = h_a / sum h` for one percept.
    pub fn probabilities(&self, percept: usize) -> ProbabilityVector {
        ProbabilityVector::from_weights(&self.h[percept]).expect("h-values are positive")
    }
}

/// `h <- max(floor, h + lambda * reward - gamma * (h - floor))` for the
/// chosen pair only.
pub fn learn_update(
    h: &HValues,
    percept: usize,
    action: usize,
    reward: f64,
    params: &LearningParams,
) -> Result<HValues, EcmError> {
    if reward < 0.0 {
        return Err(EcmError::NegativeReward(reward));
    }
    let current = h.get(percept, action).ok_or(EcmError::UnknownPerceptOrAction { percept, action })?;
    let mut next = h.clone();
    next.h[percept][action] =
        (current + params.lambda * reward - params.gamma * (current - h.floor)).max(h.floor);
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    fn ids(v: &[usize]) -> BTreeSet<ClipId> {
        v.iter().map(|&i| ClipId(i)).collect()
    }

    fn two_state() -> StochasticMatrix {
        StochasticMatrix::from_columns(&[vec![0.9, 0.1], vec![0.3, 0.7]]).unwrap()
    }

    #[test]
    fn identity_on_percept_and_action_is_valid() {
        let clips = vec![Clip::new(1, ClipKind::Percept, "s"), Clip::new(2, ClipKind::Action, "a")];
        let net = validate_network(arr2(&[[1.0, 0.0], [0.0, 1.0]]), clips).unwrap();
        assert_eq!(net.actions(), ids(&[2]));
    }

    #[test]
    fn overfull_column_is_reported_with_its_sum() {
        let clips = vec![Clip::new(1, ClipKind::Percept, "s"), Clip::new(2, ClipKind::Action, "a")];
        let errs = validate_network(arr2(&[[0.5, 0.0], [0.6, 1.0]]), clips).unwrap_err();
        assert_eq!(errs.len(), 1);
        match errs[0] {
            EcmError::NonStochasticColumn(1, sum) => assert!((sum - 1.1).abs() < 1e-15),
            ref e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn rank_one_three_clip_network_is_valid() {
        let col = [0.6, 0.3, 0.1];
        let m = Array2::from_shape_fn((3, 3), |(i, _)| col[i]);
        let clips = vec![
            Clip::new(1, ClipKind::Percept, "s"),
            Clip::new(2, ClipKind::Internal, "c"),
            Clip::new(3, ClipKind::Action, "a"),
        ];
        assert!(validate_network(m, clips).is_ok());
    }

    #[test]
    fn missing_actions_and_bad_dimensions_are_all_collected() {
        let clips = vec![Clip::new(1, ClipKind::Percept, "s")];
        let errs = validate_network(arr2(&[[1.0, 0.0], [0.0, 1.0]]), clips).unwrap_err();
        assert!(errs.contains(&EcmError::NoActionClips));
        assert!(errs.contains(&EcmError::DimensionMismatch { expected: 1, found: 2 }));
    }

    #[test]
    fn reversible_two_state_chain_is_its_own_time_reversal() {
        let p = two_state();
        let pi = ProbabilityVector::new(vec![0.75, 0.25]).unwrap();
        let star = time_reversed(&p, &pi).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((star.get(i, j) - p.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rank_one_time_reversal_matches_direct_formula() {
        let pi = ProbabilityVector::new(vec![0.6, 0.3, 0.1]).unwrap();
        let p = StochasticMatrix::rank_one(&pi);
        let star = time_reversed(&p, &pi).unwrap();
        // p*_ij = p_ji pi_i / pi_j = pi_j pi_i / pi_j = pi_i: the chain is reversible.
        for i in 0..3 {
            for j in 0..3 {
                let direct = p.get(j, i) * pi.as_slice()[i] / pi.as_slice()[j];
                assert!((star.get(i, j) - direct).abs() < 1e-15);
                assert!((star.get(i, j) - pi.as_slice()[i]).abs() < 1e-15);
            }
        }
        for j in 0..3 {
            let sum: f64 = star.column(j).iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_doubly_stochastic_reversal_is_transpose() {
        let p = StochasticMatrix::from_columns(&[
            vec![0.5, 0.3, 0.2],
            vec![0.3, 0.4, 0.3],
            vec![0.2, 0.3, 0.5],
        ])
        .unwrap();
        let pi = ProbabilityVector::uniform(3);
        let star = time_reversed(&p, &pi).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((star.get(i, j) - p.get(j, i)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_stationary_entry_is_rejected() {
        let p = StochasticMatrix::from_columns(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let pi = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(time_reversed(&p, &pi), Err(EcmError::ZeroStationaryEntry(ClipId(2))));
    }

    #[test]
    fn flag_removal_and_reset() {
        let all = FlagSet::all(ids(&[1, 2, 3])).unwrap();
        assert_eq!(all.update(ClipId(3), false).unwrap().flagged(), &ids(&[1, 2]));

        let last = FlagSet::with_flagged(ids(&[1, 2, 3]), ids(&[3])).unwrap();
        assert_eq!(last.update(ClipId(3), false).unwrap().flagged(), &ids(&[1, 2, 3]));

        let two = FlagSet::with_flagged(ids(&[1, 2, 3]), ids(&[1, 2])).unwrap();
        assert_eq!(two.update(ClipId(1), true).unwrap(), two);

        assert_eq!(two.update(ClipId(4), false), Err(EcmError::NotAnAction(ClipId(4))));
    }

    #[test]
    fn unflagged_unrewarded_action_leaves_flags_alone() {
        let two = FlagSet::with_flagged(ids(&[1, 2, 3]), ids(&[1, 2])).unwrap();
        assert_eq!(two.update(ClipId(3), false).unwrap(), two);
        assert_eq!(two.bitmask(), 0b011);
    }

    #[test]
    fn reward_accumulates_into_h_values() {
        let h = HValues::uniform(1, 3, 1.0);
        let next = learn_update(&h, 0, 2, 1.0, &LearningParams::default()).unwrap();
        assert_eq!(next.row(0), &[1.0, 1.0, 2.0]);
        assert_eq!(next.probabilities(0).as_slice(), &[0.25, 0.25, 0.5]);
        assert_eq!(learn_update(&h, 0, 1, 0.0, &LearningParams::default()).unwrap(), h);
    }

    #[test]
    fn repeated_reward_drives_probability_to_one_monotonically() {
        let mut h = HValues::uniform(1, 3, 1.0);
        let mut last = h.probabilities(0).as_slice()[2];
        for _ in 0..100 {
            h = learn_update(&h, 0, 2, 1.0, &LearningParams::default()).unwrap();
            let p = h.probabilities(0).as_slice()[2];
            assert!(p > last);
            last = p;
        }
        // h = (1, 1, 101)
        assert!((last - 101.0 / 103.0).abs() < 1e-15);
    }

    #[test]
    fn forgetting_pulls_towards_the_floor() {
        let h = HValues::from_rows(vec![vec![1.0, 11.0]], 1.0);
        let params = LearningParams { lambda: 1.0, gamma: 0.5 };
        let next = learn_update(&h, 0, 1, 0.0, &params).unwrap();
        assert_eq!(next.row(0), &[1.0, 6.0]);
    }

    #[test]
    fn learn_update_errors() {
        let h = HValues::uniform(1, 3, 1.0);
        let p = LearningParams::default();
        assert_eq!(learn_update(&h, 0, 0, -1.0, &p), Err(EcmError::NegativeReward(-1.0)));
        assert_eq!(
            learn_update(&h, 1, 0, 1.0, &p),
            Err(EcmError::UnknownPerceptOrAction { percept: 1, action: 0 })
        );
    }

    #[test]
    fn network_text_parses_and_reports_errors() {
        let text = "3\n0 0 0\n0.5 1 0\n0.5 0 1\n2 3\n";
        let net = ClipNetwork::parse(text).unwrap();
        assert_eq!(net.actions(), ids(&[2, 3]));
        assert_eq!(net.kind(ClipId(1)), Some(ClipKind::Internal));
        let again = ClipNetwork::parse(&net.to_text()).unwrap();
        assert_eq!(again, net);

        assert!(ClipNetwork::parse("2\n0.5 0\n0.6 1\n2\n").is_err());
        assert!(ClipNetwork::parse("2\n1 0\n0 1\n").is_err());
        assert!(ClipNetwork::parse("2\n1 0\n0 x\n2\n").is_err());
        assert!(ClipNetwork::parse("2\n1 0\n0 1\n3\n").is_err());
    }
}
