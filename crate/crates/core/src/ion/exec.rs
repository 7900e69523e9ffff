use std::fmt;

use ndarray::Array1;

use super::multilevel::{multilevel_index, Level};
use super::{IonError, Pulse, PulseKind, PulseSequence, Quadrature, Target};
use crate::linalg::{identity, kron, rx, ry, rz, CMatrix, CVector};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Qubits(usize),
    HiddenPair,
    Multilevel,
}

impl Space {
    pub fn dim(self) -> usize {
        match self {
            Space::Qubits(k) => 1 << k,
            Space::HiddenPair => 5,
            Space::Multilevel => 32,
        }
    }

    fn ions(self) -> usize {
        match self {
            Space::Qubits(k) => k,
            _ => 2,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Qubits(k) => write!(f, "{k} qubits"),
            Space::HiddenPair => f.write_str("two qubits with hiding state"),
            Space::Multilevel => f.write_str("two four-level ions with a vibrational mode"),
        }
    }
}

fn unsupported(p: &Pulse, space: Space) -> IonError {
    IonError::UnsupportedKindForDimension { kind: p.kind().token(), space: space.to_string() }
}

fn ion_of(p: &Pulse, space: Space) -> Result<usize, IonError> {
    match p.target() {
        Target::Ion(i) if i >= 1 && i <= space.ions() => Ok(i),
        t => Err(IonError::InvalidPulse(format!("target {t} on {space}"))),
    }
}

/// `op` on ion `ion` (1-based, most significant first) of `ions`, identity elsewhere.
fn on_ion(op: &CMatrix, ion: usize, ions: usize, local: usize) -> CMatrix {
    (1..=ions).fold(identity(1), |acc, i| if i == ion { kron(&acc, op) } else { kron(&acc, &identity(local)) })
}

/// Identity with the 2x2 `op` acting on each `(a, b)` pair.
fn embed_pairs(dim: usize, pairs: &[(usize, usize)], op: &CMatrix) -> CMatrix {
    let mut out = identity(dim);
    for &(a, b) in pairs {
        out[[a, a]] = op[[0, 0]];
        out[[a, b]] = op[[0, 1]];
        out[[b, a]] = op[[1, 0]];
        out[[b, b]] = op[[1, 1]];
    }
    out
}

/// Qubit operator on `{g, e}` padded with identity on the primed levels.
fn four_level(op: &CMatrix) -> CMatrix {
    embed_pairs(4, &[(0, 1)], op)
}

fn quadrature_op(q: Quadrature, angle: f64) -> CMatrix {
    match q {
        Quadrature::X => rx(angle),
        Quadrature::Z => rz(angle),
    }
}

fn detuned_pairs(kind: PulseKind, ion: usize) -> Vec<(usize, usize)> {
    let at = |own: usize, other: usize, v: usize| {
        if ion == 1 { multilevel_index(own, other, v) } else { multilevel_index(other, own, v) }
    };
    let mut pairs = Vec::new();
    for other in 0..4 {
        match kind {
            PulseKind::DetunedCz(_) => pairs.push((at(0, other, 0), at(1, other, 1))),
            PulseKind::DetunedHide(l, _) => pairs.push((at(l.index(), other, 1), at(l.primed(), other, 0))),
            PulseKind::DetunedSwitch(l, _) => {
                for v in 0..2 {
                    pairs.push((at(l.index(), other, v), at(l.primed(), other, v)));
                }
            }
            _ => unreachable!("not a detuned kind"),
        }
    }
    pairs
}

fn quadrature(kind: PulseKind) -> Option<Quadrature> {
    match kind {
        PulseKind::DetunedCz(q) | PulseKind::DetunedHide(_, q) | PulseKind::DetunedSwitch(_, q) => Some(q),
        _ => None,
    }
}

/// Unitary of a single pulse. Collective X is `exp(-i theta/2 sum X_j)`,
/// single Z is `exp(-i theta/2 Z_j)`, the Mølmer-Sørensen pulse rotates
/// `|gg> -> |g'g'>` about Y, and detuned pulses rotate their two-level
/// transition about X or Z.
pub fn pulse_unitary(p: &Pulse, space: Space) -> Result<CMatrix, IonError> {
    let theta = p.angle();
    match space {
        Space::Qubits(k) => match p.kind() {
            PulseKind::CollectiveX => Ok(on_all(&rx(theta), k)),
            PulseKind::SingleZ => Ok(on_ion(&rz(theta), ion_of(p, space)?, k, 2)),
            _ => Err(unsupported(p, space)),
        },
        Space::HiddenPair => {
            let qubit = match p.kind() {
                PulseKind::MolmerSorensen => return Ok(embed_pairs(5, &[(0, 4)], &ry(theta))),
                PulseKind::CollectiveX | PulseKind::SingleZ => pulse_unitary(p, Space::Qubits(2))?,
                _ => return Err(unsupported(p, space)),
            };
            let mut out = identity(5);
            out.slice_mut(ndarray::s![..4, ..4]).assign(&qubit);
            Ok(out)
        }
        Space::Multilevel => {
            let ions = match p.kind() {
                PulseKind::CollectiveX => on_all(&four_level(&rx(theta)), 2),
                PulseKind::SingleZ => on_ion(&four_level(&rz(theta)), ion_of(p, space)?, 2, 4),
                PulseKind::MolmerSorensen => {
                    let pairs: Vec<_> =
                        (0..2).map(|v| (multilevel_index(0, 0, v), multilevel_index(2, 2, v))).collect();
                    return Ok(embed_pairs(32, &pairs, &ry(theta)));
                }
                kind => {
                    let q = quadrature(kind).expect("detuned kind");
                    let pairs = detuned_pairs(kind, ion_of(p, space)?);
                    return Ok(embed_pairs(32, &pairs, &quadrature_op(q, theta)));
                }
            };
            Ok(kron(&ions, &identity(2)))
        }
    }
}

fn on_all(op: &CMatrix, ions: usize) -> CMatrix {
    (0..ions).fold(identity(1), |acc, _| kron(&acc, op))
}

/// Per-pulse unitaries in time order. In the multilevel space detuned pulses
/// are defined relative to the frame of the collective X pulses applied so
/// far: with accumulated collective angle `phi` a detuned operation `O`
/// acts as `X(phi) O X(-phi)`.
fn step_unitaries(seq: &PulseSequence, space: Space) -> Result<Vec<CMatrix>, IonError> {
    let mut frame = 0.0;
    seq.pulses()
        .iter()
        .map(|p| {
            let u = pulse_unitary(p, space)?;
            let kind = p.kind();
            if kind == PulseKind::CollectiveX {
                frame += p.angle();
            }
            if space == Space::Multilevel && quadrature(kind).is_some() && frame != 0.0 {
                let x = pulse_unitary(&Pulse::collective_x(frame), space)?;
                let x_inv = pulse_unitary(&Pulse::collective_x(-frame), space)?;
                return Ok(x.dot(&u).dot(&x_inv));
            }
            Ok(u)
        })
        .collect()
}

/// `P_n ... P_1` for a sequence in time order.
pub fn sequence_unitary(seq: &PulseSequence, space: Space) -> Result<CMatrix, IonError> {
    Ok(step_unitaries(seq, space)?.iter().fold(identity(space.dim()), |acc, u| u.dot(&acc)))
}

pub fn apply_sequence(state: &CVector, seq: &PulseSequence, space: Space) -> Result<CVector, IonError> {
    if state.len() != space.dim() {
        return Err(IonError::DimensionMismatch { expected: space.dim(), found: state.len() });
    }
    Ok(step_unitaries(seq, space)?.iter().fold(state.clone(), |acc, u| u.dot(&acc)))
}

/// In-place evolution in the five-dimensional hidden-pair space, without
/// building matrices.
pub fn apply_hidden_pair(seq: &PulseSequence, mut s: [C64; 5]) -> Result<[C64; 5], IonError> {
    for p in seq.pulses() {
        let half = p.angle() / 2.0;
        let (sn, cs) = half.sin_cos();
        match p.kind() {
            PulseKind::CollectiveX => {
                let mi = C64::new(0.0, -sn);
                for (a, b) in [(0, 2), (1, 3), (0, 1), (2, 3)] {
                    let (x, y) = (s[a], s[b]);
                    s[a] = x * cs + y * mi;
                    s[b] = x * mi + y * cs;
                }
            }
            PulseKind::SingleZ => {
                let minus = C64::new(cs, -sn);
                let plus = C64::new(cs, sn);
                let (low, high) = match ion_of(p, Space::HiddenPair)? {
                    1 => ([0, 1], [2, 3]),
                    _ => ([0, 2], [1, 3]),
                };
                low.iter().for_each(|&i| s[i] *= minus);
                high.iter().for_each(|&i| s[i] *= plus);
            }
            PulseKind::MolmerSorensen => {
                let (x, y) = (s[0], s[4]);
                s[0] = x * cs - y * sn;
                s[4] = x * sn + y * cs;
            }
            _ => return Err(unsupported(p, Space::HiddenPair)),
        }
    }
    Ok(s)
}

/// Outcome probabilities of a hidden-pair state: `c1 = |00>`, `c2 = |01>`,
/// `c3 = |10>` or `|11>`, and the hiding state last.
pub fn hidden_pair_outcomes(s: &[C64; 5]) -> [f64; 4] {
    let p: Vec<f64> = s.iter().map(|z| z.norm_sqr()).collect();
    [p[0], p[1], p[2] + p[3], p[4]]
}

pub(crate) fn basis_state(dim: usize, index: usize) -> CVector {
    let mut v = Array1::from_elem(dim, C64::new(0.0, 0.0));
    v[index] = C64::new(1.0, 0.0);
    v
}

impl Level {
    pub(crate) fn index(self) -> usize {
        match self {
            Level::G => 0,
            Level::E => 1,
        }
    }

    pub(crate) fn primed(self) -> usize {
        self.index() + 2
    }
}
