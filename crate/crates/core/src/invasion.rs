//! The invasion game: an attacker signals one of three moves and the agent is
//! rewarded for blocking, i.e. for choosing the action the current strategy
//! permutation assigns to the signal.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::classical::{classical_rps_deliberate, WalkError};
use crate::ecm::{learn_update, ClipId, EcmError, FlagSet, HValues, LearningParams};
use crate::noise::fmt_f64;
use crate::quantum::{m_epsilon, rank_one_deliberate, QuantumError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Percept {
    Down,
    Left,
    Right,
}

impl Percept {
    pub const ALL: [Percept; 3] = [Percept::Down, Percept::Left, Percept::Right];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Percept::ALL.get(i).copied()
    }

    /// Action clip matching this move: `c1 = a_down`, `c2 = a_left`, `c3 = a_right`.
    pub fn action(self) -> ClipId {
        ClipId::from_index(self.index())
    }
}

impl fmt::Display for Percept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Percept::Down => "down",
            Percept::Left => "left",
            Percept::Right => "right",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvasionError {
    #[error("{0:?} is not a permutation of the three moves")]
    InvalidPermutation([usize; 3]),
    #[error("{0} is not an action of the game")]
    InvalidAction(ClipId),
    #[error("session needs at least one round")]
    NoRounds,
    #[error(transparent)]
    Ecm(#[from] EcmError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// Which move the attacker makes after each signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameState {
    permutation: [usize; 3],
}

impl GameState {
    pub fn new(permutation: [usize; 3]) -> Result<Self, InvasionError> {
        let mut seen = [false; 3];
        for &p in &permutation {
            if p >= 3 || seen[p] {
                return Err(InvasionError::InvalidPermutation(permutation));
            }
            seen[p] = true;
        }
        Ok(GameState { permutation })
    }

    pub fn identity() -> Self {
        GameState { permutation: [0, 1, 2] }
    }

    pub fn permutation(&self) -> [usize; 3] {
        self.permutation
    }

    pub fn move_for(&self, signal: Percept) -> Percept {
        Percept::from_index(self.permutation[signal.index()]).expect("valid permutation")
    }
}

/// `1` when `action` blocks the move behind `signal`, else `0`.
pub fn env_round(state: &GameState, action: ClipId, signal: Percept) -> Result<u8, InvasionError> {
    if !(1..=3).contains(&action.0) {
        return Err(InvasionError::InvalidAction(action));
    }
    Ok(u8::from(state.move_for(signal).action() == action))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentKind {
    ClassicalRps,
    QuantumRps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub agent: AgentKind,
    pub rounds: u64,
    /// Round (0-based) from which `switched` replaces the identity strategy.
    pub switch_at: Option<u64>,
    pub switched: [usize; 3],
    pub learning: LearningParams,
    /// Start with the initially rewarded action of every percept at this
    /// probability instead of uniform h-values.
    pub initial_bias: Option<f64>,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            agent: AgentKind::QuantumRps,
            rounds: 500,
            switch_at: None,
            switched: [1, 2, 0],
            learning: LearningParams::default(),
            initial_bias: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub round: u64,
    pub signal: Percept,
    pub action: ClipId,
    pub reward: u8,
    pub n_u: u64,
    /// Flagged probability mass at deliberation time.
    pub epsilon: f64,
    /// Flags at the start of the round.
    pub flags: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SessionHistory {
    pub records: Vec<RoundRecord>,
}

impl SessionHistory {
    /// Fraction of rewarded rounds among `records[range]`.
    pub fn block_rate(&self, range: std::ops::Range<usize>) -> f64 {
        let slice = &self.records[range];
        slice.iter().map(|r| r.reward as f64).sum::<f64>() / slice.len() as f64
    }

    pub fn mean_n_u(&self, range: std::ops::Range<usize>) -> f64 {
        let slice = &self.records[range];
        slice.iter().map(|r| r.n_u as f64).sum::<f64>() / slice.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,signal,action,reward,n_u,epsilon,flags\n");
        for r in &self.records {
            out += &format!(
                "{},{},{},{},{},{},{}\n",
                r.round,
                r.signal,
                r.action.0,
                r.reward,
                r.n_u,
                fmt_f64(r.epsilon),
                r.flags
            );
        }
        out
    }
}

fn initial_h(bias: Option<f64>) -> HValues {
    match bias {
        None => HValues::uniform(3, 3, 1.0),
        Some(b) => {
            let top = 2.0 * b / (1.0 - b);
            HValues::from_rows((0..3).map(|s| (0..3).map(|a| if a == s { top } else { 1.0 }).collect()).collect(), 1.0)
        }
    }
}

/// Plays `config.rounds` rounds with uniformly drawn signals.
pub fn run_session<R: Rng + ?Sized>(config: &SessionConfig, rng: &mut R) -> Result<SessionHistory, InvasionError> {
    if config.rounds == 0 {
        return Err(InvasionError::NoRounds);
    }
    let switched = GameState::new(config.switched)?;
    let actions: BTreeSet<ClipId> = (1..=3).map(ClipId).collect();
    let mut flags = vec![FlagSet::all(actions)?; 3];
    let mut h = initial_h(config.initial_bias);
    let mut history = SessionHistory::default();
    for round in 0..config.rounds {
        let game = match config.switch_at {
            Some(s) if round >= s => switched,
            _ => GameState::identity(),
        };
        let signal = Percept::from_index(rng.random_range(0..3)).expect("three percepts");
        let s = signal.index();
        let pi = h.probabilities(s);
        let epsilon = pi.mass(flags[s].flagged());
        let outcome = match config.agent {
            AgentKind::ClassicalRps => classical_rps_deliberate(&pi, flags[s].flagged(), rng)?,
            AgentKind::QuantumRps => rank_one_deliberate(&pi, &flags[s], m_epsilon(epsilon), rng)?,
        };
        let reward = env_round(&game, outcome.action, signal)?;
        history.records.push(RoundRecord {
            round,
            signal,
            action: outcome.action,
            reward,
            n_u: outcome.steps,
            epsilon,
            flags: flags[s].bitmask(),
        });
        h = learn_update(&h, s, outcome.action.index(), reward as f64, &config.learning)?;
        flags[s] = flags[s].update(outcome.action, reward == 1)?;
    }
    Ok(history)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn rewards() {
        let id = GameState::identity();
        assert_eq!(env_round(&id, ClipId(1), Percept::Down).unwrap(), 1);
        assert_eq!(env_round(&id, ClipId(2), Percept::Down).unwrap(), 0);
        let swapped = GameState::new([1, 0, 2]).unwrap();
        assert_eq!(env_round(&swapped, ClipId(1), Percept::Down).unwrap(), 0);
        assert_eq!(env_round(&swapped, ClipId(2), Percept::Down).unwrap(), 1);
        assert!(env_round(&id, ClipId(4), Percept::Down).is_err());
        assert!(GameState::new([0, 0, 1]).is_err());
    }

    #[test]
    fn static_adversary_is_learned() {
        for agent in [AgentKind::ClassicalRps, AgentKind::QuantumRps] {
            let config = SessionConfig { agent, rounds: 500, ..Default::default() };
            let h = run_session(&config, &mut stream(1, "session", 0)).unwrap();
            assert!(h.block_rate(400..500) >= 0.8);
            assert!(h.records.iter().all(|r| r.flags != 0));
        }
    }

    #[test]
    fn flags_reset_after_switch() {
        let config = SessionConfig {
            agent: AgentKind::ClassicalRps,
            rounds: 200,
            switch_at: Some(100),
            ..Default::default()
        };
        let h = run_session(&config, &mut stream(2, "session", 0)).unwrap();
        // Before the switch every percept ends with only its rewarded action
        // flagged; the first post-switch miss empties that set, which is
        // restored to all three actions for the next round on that percept.
        let mut saw_reset = false;
        for s in Percept::ALL {
            let rounds: Vec<&RoundRecord> = h.records.iter().filter(|r| r.signal == s && r.round >= 100).collect();
            if rounds.len() >= 2 && rounds[0].flags == 1 << s.index() && rounds[0].reward == 0 {
                assert_eq!(rounds[1].flags, 0b111);
                saw_reset = true;
            }
        }
        assert!(saw_reset);
    }

    #[test]
    fn csv_log() {
        let config = SessionConfig { rounds: 3, ..Default::default() };
        let h = run_session(&config, &mut stream(3, "session", 0)).unwrap();
        let text = h.to_csv();
        assert_eq!(text.lines().next(), Some("round,signal,action,reward,n_u,epsilon,flags"));
        assert_eq!(text.lines().count(), 4);
    }
}
