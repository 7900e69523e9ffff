//! Ideal matrix-level quantum layer.
//!
//! Registers: for a chain padded to `D = 2^k` clips the walk acts on
//! `I ⊗ II` (dimension `D^2`), and the approximate reflection adds an
//! ancilla register `Aux` of `n + 1` qubits in front, `Aux ⊗ I ⊗ II`.

mod angles;
mod aro;
mod deliberation;
mod walk;

use thiserror::Error;

use crate::classical::WalkError;
use crate::ecm::{ClipId, EcmError};

pub use angles::{coherent_ctrl, controlization_angles, probability_unitary, AngleTree};
pub use aro::{aro, aro_ancilla_zero_block, aro_gate_level, default_ancillas, phase_detection, AroApplier};
pub use deliberation::{
    grover_deliberate, m_epsilon, rank_one_deliberate, ref_actions, DeliberationOutcome, GroverDeliberation,
    RankOneDeliberation,
};
pub use walk::{build_walk_operator, pad_distribution, pad_matrix, stationary_state, ClipEncoding, SzegedyWalk};

/// Tolerance for reversibility checks on supplied chains.
pub const REVERSIBILITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("length {0} is not a power of two")]
    LengthNotPowerOfTwo(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("chain is not time-reversible and no time-reversed chain was supplied")]
    NotReversible,
    #[error("target set is empty")]
    EmptyTargets,
    #[error("flagged actions have zero stationary mass")]
    EmptyTail,
    #[error("no schedule entry can reach a flagged action")]
    Unreachable,
    #[error("clip {0} is outside the network")]
    UnknownClip(ClipId),
    #[error("angle {0} is outside [0, pi]")]
    AngleOutOfRange(f64),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Ecm(#[from] EcmError),
}
