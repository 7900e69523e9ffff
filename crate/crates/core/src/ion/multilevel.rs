use std::f64::consts::{FRAC_PI_2, PI};

use ndarray::Array2;

use super::compile::compile_y;
use super::exec::sequence_unitary;
use super::{IonError, Pulse, PulseKind, PulseSequence, Quadrature, Space};
use crate::linalg::{CMatrix, CVector};

/// Largest amplitude tolerated on `|1>_v` or primed levels at rest.
pub const VIBRATIONAL_TOL: f64 = 1e-10;

/// Unprimed computational level of an ion; `g'` and `e'` are its hidden partners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    G,
    E,
}

/// Index into the 32-dimensional space; levels are `g = 0, e = 1, g' = 2, e' = 3`.
pub fn multilevel_index(level_one: usize, level_two: usize, v: usize) -> usize {
    (level_one * 4 + level_two) * 2 + v
}

/// `U_Y(theta)` on a detuned transition: X quadrature `pi/2`, Z quadrature
/// `theta`, X quadrature `-pi/2`.
fn detuned_y(kind: fn(Quadrature) -> PulseKind, ion: usize, theta: f64) -> [Pulse; 3] {
    [
        Pulse::detuned(kind(Quadrature::X), ion, FRAC_PI_2),
        Pulse::detuned(kind(Quadrature::Z), ion, theta),
        Pulse::detuned(kind(Quadrature::X), ion, -FRAC_PI_2),
    ]
}

fn cz(theta: f64) -> [Pulse; 3] {
    detuned_y(PulseKind::DetunedCz, 1, theta)
}

fn hide(level: Level, theta: f64) -> [Pulse; 3] {
    match level {
        Level::G => detuned_y(|q| PulseKind::DetunedHide(Level::G, q), 2, theta),
        Level::E => detuned_y(|q| PulseKind::DetunedHide(Level::E, q), 2, theta),
    }
}

fn switch(level: Level, theta: f64) -> [Pulse; 3] {
    match level {
        Level::G => detuned_y(|q| PulseKind::DetunedSwitch(Level::G, q), 2, theta),
        Level::E => detuned_y(|q| PulseKind::DetunedSwitch(Level::E, q), 2, theta),
    }
}

/// Ion I controls which of two Y rotations acts on ion II.
#[derive(Debug, Clone)]
pub struct ControlizationProtocol {
    pulses: PulseSequence,
    unitary: CMatrix,
}

impl ControlizationProtocol {
    pub fn pulses(&self) -> &PulseSequence {
        &self.pulses
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    /// Restriction to `{g, e} ⊗ {g, e} ⊗ |0>_v`, ordered `|gg>, |ge>, |eg>, |ee>`.
    pub fn computational_block(&self) -> CMatrix {
        computational_block(&self.unitary)
    }

    /// Runs the protocol; the vibrational mode must start in `|0>_v`.
    pub fn apply(&self, state: &CVector) -> Result<CVector, IonError> {
        if state.len() != 32 {
            return Err(IonError::DimensionMismatch { expected: 32, found: state.len() });
        }
        if state.iter().enumerate().any(|(i, z)| i % 2 == 1 && z.norm() > VIBRATIONAL_TOL) {
            return Err(IonError::VibrationalModeNotGround);
        }
        Ok(self.unitary.dot(state))
    }
}

pub(crate) fn computational_block(u: &CMatrix) -> CMatrix {
    let idx: Vec<usize> = [(0, 0), (0, 1), (1, 0), (1, 1)].iter().map(|&(a, b)| multilevel_index(a, b, 0)).collect();
    Array2::from_shape_fn((4, 4), |(i, j)| u[[idx[i], idx[j]]])
}

/// The eight-step protocol in the lab frame, each operation a three-pulse Y
/// rotation (36 pulses): map ion I onto the vibrational mode, hide ion II
/// for the `|g>` branch, rotate by `theta_3`, switch the hidden and visible
/// populations, rotate by `theta_2`, switch back, unhide and return control.
/// The result is `-ctrl(U(theta_2), U(theta_3))` on the computational subspace.
pub fn controlization_protocol_2ion(theta2: f64, theta3: f64) -> Result<ControlizationProtocol, IonError> {
    let mut pulses = Vec::with_capacity(36);
    pulses.extend(cz(PI));
    pulses.extend(hide(Level::G, PI));
    pulses.extend(hide(Level::E, PI));
    pulses.extend(compile_y(theta3, 2, 2).pulses().iter().copied());
    pulses.extend(switch(Level::G, PI));
    pulses.extend(switch(Level::E, PI));
    pulses.extend(compile_y(theta2, 2, 2).pulses().iter().copied());
    pulses.extend(switch(Level::G, PI));
    pulses.extend(switch(Level::E, PI));
    pulses.extend(hide(Level::G, -PI));
    pulses.extend(hide(Level::E, -PI));
    pulses.extend(cz(-PI));
    let pulses = PulseSequence::new(2, pulses)?;
    let unitary = sequence_unitary(&pulses, Space::Multilevel)?;
    Ok(ControlizationProtocol { pulses, unitary })
}

/// `ctrl(U(theta_2), U(theta_3)) (U(theta_1) ⊗ 1)` with the collective X
/// pulses of the three computational rotations shared: one `X(pi/2)` at the
/// start, one `X(-pi/2)` at the end and single Z pulses in between (35
/// pulses). Detuned pulses are interpreted in the rotated frame.
pub fn shared_x_controlized_schedule(theta1: f64, theta2: f64, theta3: f64) -> PulseSequence {
    let mut pulses = vec![Pulse::collective_x(FRAC_PI_2), Pulse::single_z(1, theta1)];
    pulses.extend(cz(PI));
    pulses.extend(hide(Level::G, PI));
    pulses.extend(hide(Level::E, PI));
    pulses.push(Pulse::single_z(2, theta3));
    pulses.extend(switch(Level::G, PI));
    pulses.extend(switch(Level::E, PI));
    pulses.push(Pulse::single_z(2, theta2));
    pulses.extend(switch(Level::G, PI));
    pulses.extend(switch(Level::E, PI));
    pulses.extend(hide(Level::G, -PI));
    pulses.extend(hide(Level::E, -PI));
    pulses.extend(cz(-PI));
    pulses.push(Pulse::collective_x(-FRAC_PI_2));
    PulseSequence::new(2, pulses).expect("two ions")
}
