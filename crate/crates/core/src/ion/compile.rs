use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use super::exec::{apply_sequence, basis_state};
use super::{IonError, Pulse, PulseSequence, Space};
use crate::classical::ProbabilityVector;
use crate::ecm::ClipId;
use crate::linalg::{adjoint, reflection_about_zero, CMatrix};
use crate::quantum::{probability_unitary, ref_actions, AngleTree, ClipEncoding};

/// `U_Y(theta)` on `ion`: `X(pi/2)`, `Z_ion(theta)`, `X(-pi/2)` in time order.
pub fn compile_y(theta: f64, ion: usize, qubits: usize) -> PulseSequence {
    PulseSequence::new(
        qubits,
        vec![Pulse::collective_x(FRAC_PI_2), Pulse::single_z(ion, theta), Pulse::collective_x(-FRAC_PI_2)],
    )
    .expect("ion within register")
}

/// `-i H` on `ion`: `Z(pi)` followed by `U_Y(pi/2)`.
pub fn compile_hadamard(ion: usize, qubits: usize) -> PulseSequence {
    let mut seq = PulseSequence::new(qubits, vec![Pulse::single_z(ion, PI)]).expect("ion within register");
    seq.extend(&compile_y(FRAC_PI_2, ion, qubits));
    seq
}

/// Angles of the product-state encoding of three clips on two qubits:
/// `theta_1 = arccos sqrt(pi_1 + pi_2)`, `theta_2 = arccos sqrt(pi_1 / (pi_1 + pi_2))`
/// (zero when `pi_1 + pi_2 = 0`).
pub fn rank_one_angles(pi: &ProbabilityVector) -> Result<(f64, f64), IonError> {
    let p = pi.as_slice();
    if p.len() != 3 {
        return Err(IonError::DimensionMismatch { expected: 3, found: p.len() });
    }
    let head = (p[0] + p[1]).clamp(0.0, 1.0);
    let theta1 = head.sqrt().acos();
    let theta2 = if head > 0.0 { (p[0] / head).clamp(0.0, 1.0).sqrt().acos() } else { 0.0 };
    Ok((theta1, theta2))
}

/// `U = U_Y(2 theta_1) ⊗ U_Y(2 theta_2)` with shared X pulses.
pub fn rank_one_init(theta1: f64, theta2: f64) -> PulseSequence {
    PulseSequence::new(
        2,
        vec![
            Pulse::collective_x(FRAC_PI_2),
            Pulse::single_z(1, 2.0 * theta1),
            Pulse::single_z(2, 2.0 * theta2),
            Pulse::collective_x(-FRAC_PI_2),
        ],
    )
    .expect("two ions")
}

fn rank_one_adjoint(theta1: f64, theta2: f64) -> [Pulse; 4] {
    [
        Pulse::collective_x(FRAC_PI_2),
        Pulse::single_z(2, -2.0 * theta2),
        Pulse::single_z(1, -2.0 * theta1),
        Pulse::collective_x(-FRAC_PI_2),
    ]
}

fn check_flags(flags: &BTreeSet<ClipId>) -> Result<(), IonError> {
    let supported: BTreeSet<ClipId> = [ClipId(1), ClipId(2)].into();
    if *flags == supported { Ok(()) } else { Err(IonError::UnsupportedFlagSet) }
}

/// Initialisation followed by `m` blocks of twelve pulses: the flag
/// reflection `Z_1(pi)`, `U^dagger`, the hiding reflection
/// `MS(pi) Z_1(2 pi) MS(-pi)` and `U`.
pub fn compile_rank_one_deliberation(
    theta1: f64,
    theta2: f64,
    flags: &BTreeSet<ClipId>,
    m: u64,
) -> Result<PulseSequence, IonError> {
    check_flags(flags)?;
    let init = rank_one_init(theta1, theta2);
    let mut seq = init.clone();
    for _ in 0..m {
        seq.push(Pulse::single_z(1, PI));
        rank_one_adjoint(theta1, theta2).into_iter().for_each(|p| seq.push(p));
        seq.push(Pulse::molmer_sorensen(PI));
        seq.push(Pulse::single_z(1, 2.0 * PI));
        seq.push(Pulse::molmer_sorensen(-PI));
        seq.extend(&init);
    }
    Ok(seq)
}

/// Matrix-level counterpart of [`compile_rank_one_deliberation`] on two
/// qubits: `(U D_0 U^dagger ref)^m U`.
pub fn ideal_rank_one_operator(
    theta1: f64,
    theta2: f64,
    flags: &BTreeSet<ClipId>,
    m: u64,
) -> Result<CMatrix, IonError> {
    check_flags(flags)?;
    let tree = AngleTree::from_levels(vec![vec![2.0 * theta1], vec![2.0 * theta2; 2]])
        .map_err(|e| IonError::InvalidPulse(e.to_string()))?;
    let u = probability_unitary(&tree);
    let reflect = ref_actions(&ClipEncoding::new(3), flags).map_err(|_| IonError::UnsupportedFlagSet)?;
    let step = u.dot(&reflection_about_zero(4)).dot(&adjoint(&u)).dot(&reflect);
    Ok((0..m).fold(u.clone(), |acc, _| step.dot(&acc)))
}

/// Clip probabilities after the initialisation pulses, with `|10>` and
/// `|11>` both decoded as `c_3`.
pub fn measurement_distribution(theta1: f64, theta2: f64) -> [f64; 3] {
    let out = apply_sequence(&basis_state(4, 0), &rank_one_init(theta1, theta2), Space::Qubits(2))
        .expect("two-qubit sequence");
    let p: Vec<f64> = out.iter().map(|z| z.norm_sqr()).collect();
    [p[0], p[1], p[2] + p[3]]
}

/// Elementary pulses for coherently controlling a `k`-qubit probability
/// unitary: `7 * 2^(k+2) - 24k - 29`.
pub fn pulse_count_formula(k: usize) -> Result<u64, IonError> {
    if k < 2 {
        return Err(IonError::KTooSmall(k));
    }
    Ok(7 * (1u64 << (k + 2)) - 24 * k as u64 - 29)
}
