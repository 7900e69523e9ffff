use std::ops::Range;

use ndarray::{Array1, Array2};

use super::{coherent_ctrl, controlization_angles, probability_unitary, QuantumError, REVERSIBILITY_TOL};
use crate::classical::stationary_distribution;
use crate::ecm::{ClipId, StochasticMatrix, STOCHASTIC_TOL};
use crate::linalg::{adjoint, identity, kron, reflection_about_zero, swap_registers, CMatrix, CVector, ONE, ZERO};
use crate::C64;

/// Placement of `clips` clips in a register of `dim = 2^k` basis states.
/// The last clip is duplicated over the spare states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClipEncoding {
    clips: usize,
    dim: usize,
}

impl ClipEncoding {
    pub fn new(clips: usize) -> Self {
        assert!(clips > 0, "encoding needs at least one clip");
        ClipEncoding { clips, dim: clips.next_power_of_two().max(2) }
    }

    pub fn clips(&self) -> usize {
        self.clips
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    /// Basis states carrying `clip`.
    pub fn basis_states(&self, clip: ClipId) -> Result<Range<usize>, QuantumError> {
        let i = clip.index();
        if i >= self.clips {
            return Err(QuantumError::UnknownClip(clip));
        }
        Ok(if i + 1 == self.clips { i..self.dim } else { i..i + 1 })
    }

    pub fn decode(&self, basis: usize) -> ClipId {
        ClipId::from_index(basis.min(self.clips - 1))
    }

    /// Sums basis-state probabilities into clip probabilities.
    pub fn decode_distribution(&self, basis_probs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.clips];
        for (i, p) in basis_probs.iter().enumerate() {
            out[self.decode(i).index()] += p;
        }
        out
    }

    fn copies(&self) -> usize {
        self.dim - self.clips + 1
    }

    fn source(&self, basis: usize) -> usize {
        basis.min(self.clips - 1)
    }
}

/// Distribution over clips spread over the padded register.
pub fn pad_distribution(p: &[f64], enc: &ClipEncoding) -> Vec<f64> {
    let c = enc.copies() as f64;
    (0..enc.dim())
        .map(|i| {
            let s = enc.source(i);
            if s + 1 == enc.clips() { p[s] / c } else { p[s] }
        })
        .collect()
}

/// The padded chain: copies of the last clip behave like it and share its
/// incoming probability equally. Reversibility and the (padded) stationary
/// distribution carry over.
pub fn pad_matrix(p: &StochasticMatrix, enc: &ClipEncoding) -> Result<StochasticMatrix, QuantumError> {
    if p.dim() != enc.clips() {
        return Err(QuantumError::DimensionMismatch { expected: enc.clips(), found: p.dim() });
    }
    let columns: Vec<Vec<f64>> = (0..enc.dim()).map(|j| pad_distribution(&p.column(enc.source(j)), enc)).collect();
    Ok(StochasticMatrix::from_columns(&columns)?)
}

/// Szegedy walk `W = ref(B) ref(A)` on `I ⊗ II` together with its parts.
#[derive(Debug, Clone)]
pub struct SzegedyWalk {
    encoding: ClipEncoding,
    pi: Vec<f64>,
    u_p: CMatrix,
    v_p: CMatrix,
    ref_a: CMatrix,
    ref_b: CMatrix,
    w: CMatrix,
}

impl SzegedyWalk {
    pub fn encoding(&self) -> &ClipEncoding {
        &self.encoding
    }

    /// Stationary distribution of the padded chain.
    pub fn padded_stationary(&self) -> &[f64] {
        &self.pi
    }

    pub fn u_p(&self) -> &CMatrix {
        &self.u_p
    }

    pub fn v_p(&self) -> &CMatrix {
        &self.v_p
    }

    pub fn ref_a(&self) -> &CMatrix {
        &self.ref_a
    }

    pub fn ref_b(&self) -> &CMatrix {
        &self.ref_b
    }

    pub fn w(&self) -> &CMatrix {
        &self.w
    }

    /// `|pi'> = U_P sum_i sqrt(pi_i) |i>|0>`.
    pub fn stationary_state(&self) -> CVector {
        self.u_p.dot(&register_one_state(&self.pi, self.encoding.dim()))
    }

    /// Projector onto `A = span{U_P |i>|0>}`.
    pub fn projector_a(&self) -> CMatrix {
        let d = self.encoding.dim();
        let mut zero = Array2::zeros((d, d));
        zero[[0, 0]] = ONE;
        self.u_p.dot(&kron(&identity(d), &zero)).dot(&adjoint(&self.u_p))
    }
}

fn register_one_state(pi: &[f64], d: usize) -> CVector {
    let mut v = Array1::from_elem(d * d, ZERO);
    for (i, &p) in pi.iter().enumerate() {
        v[i * d] = C64::new(p.sqrt(), 0.0);
    }
    v
}

fn column_controlled(p: &StochasticMatrix) -> Result<CMatrix, QuantumError> {
    let branches = (0..p.dim())
        .map(|j| Ok(probability_unitary(&controlization_angles(&p.column(j))?)))
        .collect::<Result<Vec<_>, QuantumError>>()?;
    coherent_ctrl(&branches)
}

/// Builds the walk for `p`. Reversible chains use the register swap for
/// `V_P`; otherwise the time-reversed chain must be supplied.
pub fn build_walk_operator(
    p: &StochasticMatrix,
    reversed: Option<&StochasticMatrix>,
) -> Result<SzegedyWalk, QuantumError> {
    let encoding = ClipEncoding::new(p.dim());
    let pi = stationary_distribution(p, STOCHASTIC_TOL)?;
    let padded = pad_matrix(p, &encoding)?;
    let d = encoding.dim();
    let u_p = column_controlled(&padded)?;
    let swap = swap_registers(d);
    let v_p = match reversed {
        None => {
            if !p.satisfies_detailed_balance(&pi, REVERSIBILITY_TOL) {
                return Err(QuantumError::NotReversible);
            }
            swap.dot(&u_p).dot(&swap)
        }
        Some(star) => swap.dot(&column_controlled(&pad_matrix(star, &encoding)?)?).dot(&swap),
    };
    let d0 = reflection_about_zero(d);
    let ref_a = u_p.dot(&kron(&identity(d), &d0)).dot(&adjoint(&u_p));
    let ref_b = v_p.dot(&kron(&d0, &identity(d))).dot(&adjoint(&v_p));
    let w = ref_b.dot(&ref_a);
    Ok(SzegedyWalk { encoding, pi: pad_distribution(pi.as_slice(), &encoding), u_p, v_p, ref_a, ref_b, w })
}

/// `sum_i sqrt(pi_i) |c_i> U_i |0>` for the padded chain of `p`.
pub fn stationary_state(p: &StochasticMatrix) -> Result<CVector, QuantumError> {
    let encoding = ClipEncoding::new(p.dim());
    let pi = pad_distribution(stationary_distribution(p, STOCHASTIC_TOL)?.as_slice(), &encoding);
    let u_p = column_controlled(&pad_matrix(p, &encoding)?)?;
    Ok(u_p.dot(&register_one_state(&pi, encoding.dim())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::ProbabilityVector;
    use crate::ecm::time_reversed;
    use crate::linalg::{max_abs_diff, norm, pauli_x, ry, unitarity_defect, vector_phase_diff};

    fn reversible_chain() -> StochasticMatrix {
        // Symmetric weights w_ij normalised by column sums give a reversible
        // chain with pi proportional to the column sums.
        let w = [[1.0, 2.0, 0.5, 0.3], [2.0, 0.4, 1.0, 0.7], [0.5, 1.0, 2.0, 1.5], [0.3, 0.7, 1.5, 0.2]];
        let cols: Vec<Vec<f64>> = (0..4)
            .map(|j| {
                let s: f64 = (0..4).map(|i| w[i][j]).sum();
                (0..4).map(|i| w[i][j] / s).collect()
            })
            .collect();
        StochasticMatrix::from_columns(&cols).unwrap()
    }

    #[test]
    fn encoding_duplicates_last_clip() {
        let e = ClipEncoding::new(3);
        assert_eq!(e.dim(), 4);
        assert_eq!(e.basis_states(ClipId(3)).unwrap(), 2..4);
        assert_eq!(e.basis_states(ClipId(1)).unwrap(), 0..1);
        assert_eq!(e.decode(3), ClipId(3));
        assert_eq!(pad_distribution(&[0.2, 0.2, 0.6], &e), vec![0.2, 0.2, 0.3, 0.3]);
        assert_eq!(ClipEncoding::new(1).dim(), 2);
        assert_eq!(ClipEncoding::new(4).dim(), 4);
    }

    #[test]
    fn padding_preserves_stationarity_and_balance() {
        let cols = vec![vec![0.2, 0.5, 0.3], vec![0.4, 0.1, 0.5], vec![0.1, 0.6, 0.3]];
        let p = StochasticMatrix::from_columns(&cols).unwrap();
        let enc = ClipEncoding::new(3);
        let padded = pad_matrix(&p, &enc).unwrap();
        let pi = stationary_distribution(&p, 1e-12).unwrap();
        let pi_pad = pad_distribution(pi.as_slice(), &enc);
        let image = padded.apply(&pi_pad);
        for (a, b) in image.iter().zip(&pi_pad) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn single_qubit_rank_one_walk_factor_is_pauli_x() {
        let u = ry(std::f64::consts::FRAC_PI_2);
        let r = u.dot(&reflection_about_zero(2)).dot(&adjoint(&u));
        assert!(max_abs_diff(&r, &pauli_x()) < 1e-15);

        let p = StochasticMatrix::rank_one(&ProbabilityVector::uniform(2));
        let walk = build_walk_operator(&p, None).unwrap();
        assert!(max_abs_diff(walk.w(), &kron(&pauli_x(), &pauli_x())) < 1e-12);
    }

    #[test]
    fn reversible_walk_fixes_stationary_state() {
        let p = reversible_chain();
        let walk = build_walk_operator(&p, None).unwrap();
        for m in [walk.u_p(), walk.v_p(), walk.ref_a(), walk.ref_b(), walk.w()] {
            assert!(unitarity_defect(m) < 1e-10);
        }
        assert!(max_abs_diff(&walk.ref_a().dot(walk.ref_a()), &identity(16)) < 1e-10);
        let s = walk.stationary_state();
        assert!((norm(&s) - 1.0).abs() < 1e-12);
        let ws = walk.w().dot(&s);
        assert!(vector_phase_diff(&ws, &s) < 1e-10);
        let overlap: C64 = s.iter().zip(ws.iter()).map(|(a, b)| a.conj() * b).sum();
        assert!((overlap - ONE).norm() < 1e-10);
        assert!(max_abs_diff(&s.clone().insert_axis(ndarray::Axis(1)), &stationary_state(&p).unwrap().insert_axis(ndarray::Axis(1))) < 1e-12);
    }

    #[test]
    fn irreversible_chain_needs_time_reversal() {
        let cols = vec![vec![0.1, 0.6, 0.3], vec![0.3, 0.1, 0.6], vec![0.6, 0.3, 0.1]];
        let p = StochasticMatrix::from_columns(&cols).unwrap();
        assert!(matches!(build_walk_operator(&p, None), Err(QuantumError::NotReversible)));
        let pi = stationary_distribution(&p, 1e-12).unwrap();
        let star = time_reversed(&p, &pi).unwrap();
        let walk = build_walk_operator(&p, Some(&star)).unwrap();
        let s = walk.stationary_state();
        assert!(vector_phase_diff(&walk.w().dot(&s), &s) < 1e-10);
        assert!(unitarity_defect(walk.w()) < 1e-10);
    }

    #[test]
    fn rank_one_stationary_state_is_product() {
        let pi = ProbabilityVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let s = stationary_state(&StochasticMatrix::rank_one(&pi)).unwrap();
        let root: Vec<f64> = pi.as_slice().iter().map(|x| x.sqrt()).collect();
        for i in 0..4 {
            for j in 0..4 {
                assert!((s[i * 4 + j].re - root[i] * root[j]).abs() < 1e-12);
                assert!(s[i * 4 + j].im.abs() < 1e-15);
            }
        }
        let point = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
        let s = stationary_state(&StochasticMatrix::rank_one(&point)).unwrap();
        assert!((s[0] - ONE).norm() < 1e-15);
        assert!(s.iter().skip(1).all(|z| z.norm() < 1e-15));
    }
}
