//! Reference computations on nalgebra, sharing nothing with the crate's eigensolver.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use l1a::algebra::Operator;
use l1a::functional::Functional;
use l1a::matrix::CMatrix;

pub fn na(m: &CMatrix) -> DMatrix<Complex64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m[(i, j)])
}

fn herm(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(herm(na(m))).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let e = SymmetricEigen::new(herm(m.clone()));
    let cut = 1e-10 * e.eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(|v| Complex64::new(if v <= cut { 0.0 } else { v.sqrt() }, 0.0)));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

/// `Σ_b Σ_i |λ_i(a_b^{1/2} k_b a_b^{1/2})|`.
pub fn sandwich_trace_norm(a: &Operator, phi: &Functional) -> f64 {
    a.blocks()
        .iter()
        .zip(phi.k_blocks())
        .map(|(ab, k)| {
            let r = psd_sqrt(&na(ab));
            let h = herm(&r * na(k) * &r);
            SymmetricEigen::new(h).eigenvalues.iter().map(|v| v.abs()).sum::<f64>()
        })
        .sum()
}

/// `max_b ‖(V_b* x_b V_b)‖` with `V_b` an orthonormal basis of the range of `a_b`.
pub fn compressed_norm(a: &Operator, x: &Operator) -> f64 {
    let radius = a.blocks().iter().flat_map(eigenvalues).fold(0.0_f64, |m, v| m.max(v.abs()));
    let cut = 1e-10 * radius;
    let mut best = 0.0_f64;
    for (ab, xb) in a.blocks().iter().zip(x.blocks()) {
        let e = SymmetricEigen::new(herm(na(ab)));
        let cols: Vec<usize> = (0..e.eigenvalues.len()).filter(|&i| e.eigenvalues[i] > cut).collect();
        if cols.is_empty() {
            continue;
        }
        let v = e.eigenvectors.select_columns(&cols);
        let c = herm(v.adjoint() * na(xb) * &v);
        best = best.max(SymmetricEigen::new(c).eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs())));
    }
    best
}
