//! Trapped-ion pulse schedules.
//!
//! Sequences are stored in time order: the first pulse acts first, so the
//! composed unitary is `P_n ... P_2 P_1`.
//!
//! Three state spaces are supported:
//!
//! - [`Space::Qubits`]: `k` ions restricted to `{g, e}`, dimension `2^k`.
//! - [`Space::HiddenPair`]: two qubits plus the hiding state `|g'g'>` used
//!   by the Mølmer-Sørensen reflection, dimension 5 (index 4 is `|g'g'>`).
//! - [`Space::Multilevel`]: two ions with levels `g, e, g', e'` and one
//!   vibrational mode truncated to `{|0>_v, |1>_v}`, dimension 32 with index
//!   `(4 * l_I + l_II) * 2 + v`.

mod compile;
mod exec;
mod multilevel;
mod pulse;

use thiserror::Error;

pub use compile::{
    compile_hadamard, compile_rank_one_deliberation, compile_y, ideal_rank_one_operator, measurement_distribution,
    pulse_count_formula, rank_one_angles, rank_one_init,
};
pub use exec::{apply_hidden_pair, apply_sequence, hidden_pair_outcomes, pulse_unitary, sequence_unitary, Space};
pub use multilevel::{
    controlization_protocol_2ion, multilevel_index, shared_x_controlized_schedule, ControlizationProtocol, Level,
    VIBRATIONAL_TOL,
};
pub use pulse::{NoiseClass, Pulse, PulseKind, PulseSequence, Quadrature, Target};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IonError {
    #[error("pulse {kind} is not defined on {space}")]
    UnsupportedKindForDimension { kind: String, space: String },
    #[error("flag set is not supported by the pulse compiler (only {{c1, c2}})")]
    UnsupportedFlagSet,
    #[error("pulse count formula needs k >= 2, got {0}")]
    KTooSmall(usize),
    #[error("vibrational mode is not in its ground state")]
    VibrationalModeNotGround,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
