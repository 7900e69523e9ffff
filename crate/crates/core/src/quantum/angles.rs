use std::f64::consts::PI;

use super::QuantumError;
use crate::linalg::{block_diagonal, identity, kron, ry, CMatrix};

/// Binary tree of Y-rotation angles encoding a distribution over `2^k`
/// basis states. Level `l` (1-based) holds `2^(l-1)` angles and acts on the
/// `l`-th most significant qubit, controlled by the qubits above it.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleTree {
    levels: Vec<Vec<f64>>,
}

impl AngleTree {
    pub fn from_levels(levels: Vec<Vec<f64>>) -> Result<Self, QuantumError> {
        for (l, level) in levels.iter().enumerate() {
            if level.len() != 1 << l {
                return Err(QuantumError::DimensionMismatch { expected: 1 << l, found: level.len() });
            }
            if let Some(&a) = level.iter().find(|a| !(0.0..=PI).contains(*a)) {
                return Err(QuantumError::AngleOutOfRange(a));
            }
        }
        Ok(AngleTree { levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// Angles in breadth-first order, `theta_1 ... theta_{2^k - 1}`.
    pub fn angles(&self) -> Vec<f64> {
        self.levels.iter().flatten().copied().collect()
    }

    /// Leaf probabilities: products of `cos^2(theta/2)` (left) and
    /// `sin^2(theta/2)` (right) along each root-to-leaf path.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut p = vec![1.0];
        for level in &self.levels {
            p = p
                .iter()
                .zip(level)
                .flat_map(|(&mass, &theta)| {
                    let c = (theta / 2.0).cos();
                    [mass * c * c, mass * (1.0 - c * c)]
                })
                .collect();
        }
        p
    }
}

pub fn controlization_angles(p: &[f64]) -> Result<AngleTree, QuantumError> {
    let n = p.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(QuantumError::LengthNotPowerOfTwo(n));
    }
    let k = n.trailing_zeros() as usize;
    let levels = (0..k)
        .map(|l| {
            let width = n >> l;
            (0..1usize << l)
                .map(|j| {
                    let node = &p[j * width..(j + 1) * width];
                    let total: f64 = node.iter().sum();
                    if total <= 0.0 {
                        return 0.0;
                    }
                    let left: f64 = node[..width / 2].iter().sum();
                    2.0 * (left / total).clamp(0.0, 1.0).sqrt().acos()
                })
                .collect()
        })
        .collect();
    AngleTree::from_levels(levels)
}

/// `L_k ... L_1`, where `L_l` applies `U_Y(theta_{l,j})` to qubit `l`
/// conditioned on the first `l - 1` qubits holding `j`.
pub fn probability_unitary(tree: &AngleTree) -> CMatrix {
    let k = tree.depth();
    let dim = 1usize << k;
    let mut u = identity(dim);
    for (l, level) in tree.levels().iter().enumerate() {
        let rest = identity(1 << (k - l - 1));
        let branches: Vec<CMatrix> = level.iter().map(|&t| kron(&ry(t), &rest)).collect();
        u = block_diagonal(&branches).dot(&u);
    }
    u
}

/// `|j> ⊗ |psi> -> |j> ⊗ U_j |psi>`.
pub fn coherent_ctrl(branches: &[CMatrix]) -> Result<CMatrix, QuantumError> {
    let count = branches.len();
    if count == 0 || !count.is_power_of_two() {
        return Err(QuantumError::LengthNotPowerOfTwo(count));
    }
    let d = branches[0].nrows();
    for b in branches {
        if b.dim() != (d, d) {
            return Err(QuantumError::DimensionMismatch { expected: d, found: b.nrows().max(b.ncols()) });
        }
    }
    Ok(block_diagonal(branches))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, pauli_x, unitarity_defect, ONE, ZERO};
    use crate::C64;
    use ndarray::arr2;

    /// Recursive assembly: `ctrl(U_left, U_right) · (U_Y(theta_root) ⊗ 1)`,
    /// with the subtrees built from the renormalised halves.
    fn oracle_unitary(p: &[f64]) -> CMatrix {
        if p.len() == 1 {
            return identity(1);
        }
        let half = p.len() / 2;
        let total: f64 = p.iter().sum();
        let left: f64 = p[..half].iter().sum();
        let theta = if total > 0.0 { 2.0 * (left / total).sqrt().acos() } else { 0.0 };
        let root = kron(&ry(theta), &identity(half));
        let ctrl = block_diagonal(&[oracle_unitary(&p[..half]), oracle_unitary(&p[half..])]);
        ctrl.dot(&root)
    }

    #[test]
    fn two_point_uniform_is_quarter_turn() {
        let t = controlization_angles(&[0.5, 0.5]).unwrap();
        assert!((t.angles()[0] - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn four_point_angles() {
        let p = [0.4, 0.1, 0.3, 0.2];
        let t = controlization_angles(&p).unwrap();
        let expect = [PI / 2.0, 2.0 * (0.8f64).sqrt().acos(), 2.0 * (0.6f64).sqrt().acos()];
        for (a, b) in t.angles().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((t.angles()[1] - 0.92730).abs() < 1e-5);
        assert!((t.angles()[2] - 1.36944).abs() < 1e-5);
        for (a, b) in t.reconstruct().iter().zip(p) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn point_mass_gives_identity() {
        let t = controlization_angles(&[1.0, 0.0]).unwrap();
        assert_eq!(t.angles(), vec![0.0]);
        assert!(max_abs_diff(&probability_unitary(&t), &identity(2)) < 1e-15);
        let t = controlization_angles(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let u = probability_unitary(&t);
        assert_eq!(u[[0, 0]], ONE);
        assert!((1..8).all(|i| u[[i, 0]] == ZERO));
    }

    #[test]
    fn zero_mass_subtrees_get_zero_angle() {
        let t = controlization_angles(&[0.0, 0.0, 0.3, 0.7]).unwrap();
        assert_eq!(t.levels()[1][0], 0.0);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert_eq!(controlization_angles(&[0.5, 0.3, 0.2]), Err(QuantumError::LengthNotPowerOfTwo(3)));
    }

    #[test]
    fn uniform_first_column() {
        let u = probability_unitary(&controlization_angles(&[0.25; 4]).unwrap());
        for i in 0..4 {
            assert!((u[[i, 0]] - C64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn matches_recursive_assembly() {
        let p = [0.05, 0.2, 0.1, 0.15, 0.0, 0.3, 0.12, 0.08];
        let u = probability_unitary(&controlization_angles(&p).unwrap());
        assert!(max_abs_diff(&u, &oracle_unitary(&p)) < 1e-12);
        assert!(unitarity_defect(&u) < 1e-12);
    }

    #[test]
    fn coherent_control_examples() {
        assert_eq!(coherent_ctrl(&[identity(2), identity(2)]).unwrap(), identity(4));
        let cnot = arr2(&[
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ZERO, ONE],
            [ZERO, ZERO, ONE, ZERO],
        ]);
        assert_eq!(coherent_ctrl(&[identity(2), pauli_x()]).unwrap(), cnot);

        let (t2, t3) = (0.7, 2.1);
        let c = coherent_ctrl(&[ry(t2), ry(t3)]).unwrap();
        let (c2, s2, c3, s3) = ((t2 / 2.0).cos(), (t2 / 2.0).sin(), (t3 / 2.0).cos(), (t3 / 2.0).sin());
        let r = |x: f64| C64::new(x, 0.0);
        let explicit = arr2(&[
            [r(c2), r(-s2), ZERO, ZERO],
            [r(s2), r(c2), ZERO, ZERO],
            [ZERO, ZERO, r(c3), r(-s3)],
            [ZERO, ZERO, r(s3), r(c3)],
        ]);
        assert!(max_abs_diff(&c, &explicit) < 1e-15);

        assert!(matches!(
            coherent_ctrl(&[identity(2), identity(4)]),
            Err(QuantumError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            coherent_ctrl(&[identity(2), identity(2), identity(2)]),
            Err(QuantumError::LengthNotPowerOfTwo(3))
        ));
    }
}
