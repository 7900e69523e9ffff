use ndarray::{s, Array1, Array2};

use crate::linalg::{adjoint, block_diagonal, hadamard, identity, kron, reflection_about_zero, CMatrix, CVector, ZERO};
use crate::C64;

/// `max(1, ceil(log2(1 / sqrt(delta))))`.
pub fn default_ancillas(delta: f64) -> usize {
    let n = (0.5 * (1.0 / delta).log2() - 1e-12).ceil();
    n.max(1.0) as usize
}

/// Gate-level phase detection on `Aux ⊗ I ⊗ II` with `n + 1` ancillas:
/// Hadamards, `W^(2^m)` controlled by ancilla `m` (bit `m` of the ancilla
/// index), Hadamards.
pub fn phase_detection(w: &CMatrix, n: usize) -> CMatrix {
    let d = w.nrows();
    let ancillas = n + 1;
    let m = 1usize << ancillas;
    let h = (0..ancillas).fold(identity(1), |acc, _| kron(&acc, &hadamard()));
    let h_all = kron(&h, &identity(d));
    let mut pd = h_all.clone();
    let mut power = w.clone();
    for bit in 0..ancillas {
        let blocks: Vec<CMatrix> =
            (0..m).map(|a| if (a >> bit) & 1 == 1 { power.clone() } else { identity(d) }).collect();
        pd = block_diagonal(&blocks).dot(&pd);
        power = power.dot(&power);
    }
    h_all.dot(&pd)
}

/// `PD(W)^dagger (D_0 ⊗ 1) PD(W)` from explicit gate matrices.
pub fn aro_gate_level(w: &CMatrix, n: usize) -> CMatrix {
    let d = w.nrows();
    let pd = phase_detection(w, n);
    let d0 = kron(&reflection_about_zero(1 << (n + 1)), &identity(d));
    adjoint(&pd).dot(&d0).dot(&pd)
}

/// Applies the approximate reflection to state vectors using precomputed
/// powers `W^a`, `a < 2^(n+1)`.
#[derive(Debug, Clone)]
pub struct AroApplier {
    ancilla_states: usize,
    dim: usize,
    powers: Vec<CMatrix>,
    adjoints: Vec<CMatrix>,
}

impl AroApplier {
    pub fn new(w: &CMatrix, n: usize) -> Self {
        let m = 1usize << (n + 1);
        let dim = w.nrows();
        let mut powers = Vec::with_capacity(m);
        powers.push(identity(dim));
        for a in 1..m {
            powers.push(w.dot(&powers[a - 1]));
        }
        let adjoints = powers.iter().map(adjoint).collect();
        AroApplier { ancilla_states: m, dim, powers, adjoints }
    }

    pub fn ancilla_states(&self) -> usize {
        self.ancilla_states
    }

    /// Dimension of the full `Aux ⊗ I ⊗ II` space.
    pub fn total_dim(&self) -> usize {
        self.ancilla_states * self.dim
    }

    /// Calls of `W` per application: two phase detections, each with
    /// `2^(n+1) - 1` walk steps.
    pub fn walk_calls(&self) -> u64 {
        2 * (self.ancilla_states as u64 - 1)
    }

    fn walsh(&self, v: &mut CVector) {
        let d = self.dim;
        let mut h = 1;
        while h < self.ancilla_states {
            for start in (0..self.ancilla_states).step_by(2 * h) {
                for a in start..start + h {
                    for r in 0..d {
                        let x = v[a * d + r];
                        let y = v[(a + h) * d + r];
                        v[a * d + r] = x + y;
                        v[(a + h) * d + r] = x - y;
                    }
                }
            }
            h *= 2;
        }
        let scale = 1.0 / (self.ancilla_states as f64).sqrt();
        v.mapv_inplace(|z| z * scale);
    }

    fn controlled(&self, v: &mut CVector, mats: &[CMatrix]) {
        let d = self.dim;
        for (a, m) in mats.iter().enumerate().skip(1) {
            let block = m.dot(&v.slice(s![a * d..(a + 1) * d]));
            v.slice_mut(s![a * d..(a + 1) * d]).assign(&block);
        }
    }

    pub fn apply(&self, state: &CVector) -> CVector {
        assert_eq!(state.len(), self.total_dim(), "state dimension");
        let d = self.dim;
        let mut v = state.clone();
        self.walsh(&mut v);
        self.controlled(&mut v, &self.powers);
        self.walsh(&mut v);
        v.slice_mut(s![d..]).mapv_inplace(|z| -z);
        self.walsh(&mut v);
        self.controlled(&mut v, &self.adjoints);
        self.walsh(&mut v);
        v
    }
}

/// Approximate reflection as a dense matrix, assembled column by column.
pub fn aro(w: &CMatrix, n: usize) -> CMatrix {
    let applier = AroApplier::new(w, n);
    let total = applier.total_dim();
    let mut out = Array2::zeros((total, total));
    for j in 0..total {
        let mut e = Array1::from_elem(total, ZERO);
        e[j] = C64::new(1.0, 0.0);
        out.column_mut(j).assign(&applier.apply(&e));
    }
    out
}

/// Ancilla-zero block `2 S^dagger S / M^2 - 1` with `S = sum_{a<M} W^a`.
pub fn aro_ancilla_zero_block(w: &CMatrix, n: usize) -> CMatrix {
    let m = 1usize << (n + 1);
    let d = w.nrows();
    let mut sum = identity(d);
    let mut power = identity(d);
    for _ in 1..m {
        power = w.dot(&power);
        sum += &power;
    }
    let scale = 2.0 / (m * m) as f64;
    adjoint(&sum).dot(&sum).mapv(|z| z * scale) - identity(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::ProbabilityVector;
    use crate::ecm::StochasticMatrix;
    use crate::linalg::{max_abs_diff, unitarity_defect, vector_phase_diff};
    use crate::quantum::build_walk_operator;

    fn chain() -> StochasticMatrix {
        let w = [[1.0, 2.0, 0.5, 0.3], [2.0, 0.4, 1.0, 0.7], [0.5, 1.0, 2.0, 1.5], [0.3, 0.7, 1.5, 0.2]];
        let cols: Vec<Vec<f64>> = (0..4)
            .map(|j| {
                let s: f64 = (0..4).map(|i| w[i][j]).sum();
                (0..4).map(|i| w[i][j] / s).collect()
            })
            .collect();
        StochasticMatrix::from_columns(&cols).unwrap()
    }

    fn block(m: &CMatrix, d: usize) -> CMatrix {
        m.slice(s![..d, ..d]).to_owned()
    }

    #[test]
    fn default_ancilla_counts() {
        assert_eq!(default_ancillas(1.0), 1);
        assert_eq!(default_ancillas(0.25), 1);
        assert_eq!(default_ancillas(1.0 / 16.0), 2);
        assert_eq!(default_ancillas(0.01), 4);
    }

    #[test]
    fn fast_route_matches_gate_level() {
        let walk = build_walk_operator(&chain(), None).unwrap();
        for n in 0..3 {
            let fast = aro(walk.w(), n);
            let gates = aro_gate_level(walk.w(), n);
            assert!(max_abs_diff(&fast, &gates) < 1e-10, "n = {n}");
            assert!(unitarity_defect(&fast) < 1e-10);
            assert!(max_abs_diff(&block(&fast, 16), &aro_ancilla_zero_block(walk.w(), n)) < 1e-10);
        }
    }

    #[test]
    fn fixes_stationary_state_with_ancillas_at_zero() {
        let walk = build_walk_operator(&chain(), None).unwrap();
        let s = walk.stationary_state();
        for n in [0, 2, 4] {
            let applier = AroApplier::new(walk.w(), n);
            let mut full = Array1::from_elem(applier.total_dim(), ZERO);
            full.slice_mut(s![..16]).assign(&s);
            let out = applier.apply(&full);
            assert!(max_abs_diff(&out.clone().insert_axis(ndarray::Axis(1)), &full.clone().insert_axis(ndarray::Axis(1))) < 1e-10);
        }
    }

    #[test]
    fn hermitian_walk_is_reproduced_exactly_by_one_ancilla() {
        let pi = ProbabilityVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let walk = build_walk_operator(&StochasticMatrix::rank_one(&pi), None).unwrap();
        let w = walk.w();
        assert!(max_abs_diff(w, &adjoint(w)) < 1e-12);
        let full = aro(w, 0);
        assert!(max_abs_diff(&block(&full, 16), w) < 1e-12);
        // Nothing leaks out of the ancilla-zero subspace.
        assert!(full.slice(s![16.., ..16]).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn error_on_subspace_a_shrinks_with_ancillas() {
        let walk = build_walk_operator(&chain(), None).unwrap();
        let s = walk.stationary_state();
        let proj = walk.projector_a();
        let d = 16;
        let mut ideal = Array2::from_shape_fn((d, d), |(i, j)| s[i] * s[j].conj() * 2.0);
        ideal = ideal - identity(d);
        let ideal_a = proj.dot(&ideal).dot(&proj);
        let errors: Vec<f64> = [2, 4, 6]
            .iter()
            .map(|&n| {
                let b = aro_ancilla_zero_block(walk.w(), n);
                max_abs_diff(&proj.dot(&b).dot(&proj), &ideal_a)
            })
            .collect();
        assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
        assert!(vector_phase_diff(&aro_ancilla_zero_block(walk.w(), 6).dot(&s), &s) < 1e-10);
    }
}
