//! Dense complex matrix helpers shared by the quantum and ion layers.

use ndarray::{s, Array1, Array2};
use num_complex::Complex64 as C64;

pub type CMatrix = Array2<C64>;
pub type CVector = Array1<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity(n: usize) -> CMatrix {
    Array2::from_diag_elem(n, ONE)
}

pub fn diagonal(entries: &[C64]) -> CMatrix {
    Array2::from_diag(&Array1::from(entries.to_vec()))
}

pub fn adjoint(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == ZERO {
                continue;
            }
            out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc])
                .assign(&b.mapv(|z| z * aij));
        }
    }
    out
}

/// Block-diagonal matrix with the given square blocks in order.
pub fn block_diagonal(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = Array2::zeros((n, n));
    let mut offset = 0;
    for b in blocks {
        let d = b.nrows();
        out.slice_mut(s![offset..offset + d, offset..offset + d]).assign(b);
        offset += d;
    }
    out
}

/// exp(-i θ/2 X)
pub fn rx(theta: f64) -> CMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    ndarray::arr2(&[[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]])
}

/// exp(-i θ/2 Y)
pub fn ry(theta: f64) -> CMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    ndarray::arr2(&[[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]])
}

/// exp(-i θ/2 Z)
pub fn rz(theta: f64) -> CMatrix {
    let half = theta / 2.0;
    diagonal(&[C64::from_polar(1.0, -half), C64::from_polar(1.0, half)])
}

pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ndarray::arr2(&[[C64::new(h, 0.0), C64::new(h, 0.0)], [C64::new(h, 0.0), C64::new(-h, 0.0)]])
}

pub fn pauli_x() -> CMatrix {
    ndarray::arr2(&[[ZERO, ONE], [ONE, ZERO]])
}

/// `dim x dim` reflection `2|0><0| - 1`.
pub fn reflection_about_zero(dim: usize) -> CMatrix {
    let mut d = identity(dim).mapv(|z| -z);
    d[[0, 0]] = ONE;
    d
}

/// Permutation exchanging the two factors of a `d x d` bipartite register.
pub fn swap_registers(d: usize) -> CMatrix {
    let mut out = Array2::zeros((d * d, d * d));
    for i in 0..d {
        for j in 0..d {
            out[[j * d + i, i * d + j]] = ONE;
        }
    }
    out
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn unitarity_defect(a: &CMatrix) -> f64 {
    let prod = adjoint(a).dot(a);
    max_abs_diff(&prod, &identity(a.nrows()))
}

/// Entrywise distance between `a` and `b` after aligning `a` with the global
/// phase that maximises `|tr(a^dagger b)|`.
pub fn phase_aligned_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}

pub fn equal_up_to_phase(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    a.dim() == b.dim() && phase_aligned_diff(a, b) <= tol
}

/// Same as [`phase_aligned_diff`] for vectors.
pub fn vector_phase_diff(a: &CVector, b: &CVector) -> f64 {
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}

pub fn norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Smallest `k` with `2^k >= n` (zero for `n <= 1`).
pub fn qubits_for(n: usize) -> usize {
    let mut k = 0;
    while (1usize << k) < n {
        k += 1;
    }
    k
}
