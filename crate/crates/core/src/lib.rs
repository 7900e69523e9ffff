//! Classical and quantum projective-simulation (PS) agents.
//!
//! The crate is organised bottom-up:
//!
//! - [`ecm`]: the clip network (episodic and compositional memory), flags and
//!   h-value learning.
//! - [`classical`]: classical random walks, stationary and tailed
//!   distributions, standard-PS and reflecting-PS deliberation.
//! - [`quantum`]: ideal matrix-level quantum layer. Probability unitaries,
//!   coherent controlization, the Szegedy walk operator, phase detection and
//!   the approximate reflection, and Grover-like deliberation.
//! - [`ion`]: trapped-ion pulse schedules, their exact unitary semantics and
//!   the two-ion multilevel controlization protocol.
//! - [`noise`]: Gaussian pulse-angle noise, Monte-Carlo deliberation trials,
//!   statistics and least-squares scaling fits.
//! - [`invasion`]: the invasion-game environment and session loop.
//!
//! Matrix convention: stochastic matrices are column-stochastic, column `j`
//! is the source clip and row `i` the destination.
//!
//! Register convention: in every tensor product the left-most factor is the
//! most significant index, so for two qubits `|q1 q2>` maps to `2*q1 + q2`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod ecm;
pub mod invasion;
pub mod ion;
pub mod linalg;
pub mod noise;
pub mod quantum;
pub mod rng;

pub use classical::{ProbabilityVector, WalkOutcome};
pub use ecm::{ClipId, ClipKind, ClipNetwork, FlagSet, HValues, StochasticMatrix};
pub use num_complex::Complex64 as C64;
