//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation zeroes one off-diagonal pair `(p, q)`. The complex phase of
//! `m[p][q]` is absorbed into the rotation, so the unitary acting on the
//! `(p, q)` plane is `D R D*` with `D = diag(1, conj(e))`, `e = m_pq / |m_pq|`
//! and `R` the classical real Jacobi rotation. Sweeps stop once the
//! off-diagonal Frobenius mass drops below `1e-13 · ‖m‖_F`.

use crate::error::{Error, Result};
use crate::matrix::{C64, CMatrix};

/// Relative stopping threshold on the off-diagonal Frobenius mass.
pub const JACOBI_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and unitary eigenvector matrix (columns) of a Hermitian matrix.
///
/// Only the Hermitian part of `m` is used; callers are expected to have checked hermiticity.
pub fn jacobi_hermitian(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();
    if n == 0 || scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let threshold = JACOBI_TOL * scale;

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        if a.off_diagonal_norm() < threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = a.off_diagonal_norm();
        if off >= threshold {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS, off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_j)] = v[(i, old_j)];
        }
    }
    Ok((values, vectors))
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let e = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau.abs() > 1e150 {
        0.5 / tau
    } else {
        let sgn = if tau >= 0.0 { 1.0 } else { -1.0 };
        sgn / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let j_pp = C64::new(c, 0.0);
    let j_qq = C64::new(c, 0.0);
    let j_pq = e * s;
    let j_qp = -e.conj() * s;

    let n = a.dim();
    // A <- A J
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * j_pp + aiq * j_qp;
        a[(i, q)] = aip * j_pq + aiq * j_qq;
    }
    // A <- J* A
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = j_pp.conj() * apj + j_qp.conj() * aqj;
        a[(q, j)] = j_pq.conj() * apj + j_qq.conj() * aqj;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // V <- V J
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * j_pp + viq * j_qp;
        v[(i, q)] = vip * j_pq + viq * j_qq;
    }
}

/// Rebuilds `V diag(f(λ)) V*`.
pub fn spectral_map(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = values.len();
    let fv: Vec<f64> = values.iter().map(|&l| f(l)).collect();
    let mut out = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for (k, &w) in fv.iter().enumerate() {
                if w != 0.0 {
                    acc += vectors[(i, k)] * vectors[(j, k)].conj() * w;
                }
            }
            out[(i, j)] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;

    fn check_decomposition(m: &CMatrix) {
        let (vals, u) = jacobi_hermitian(m).unwrap();
        let n = m.dim();
        let utu = &u.adjoint() * &u;
        assert!((&utu - &CMatrix::identity(n)).max_abs() < 1e-10);
        let rebuilt = spectral_map(&vals, &u, |x| x);
        assert!((&rebuilt - m).max_abs() < 1e-10 * (1.0 + m.frobenius_norm()));
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn identity_is_already_diagonal() {
        let (vals, u) = jacobi_hermitian(&CMatrix::identity(2)).unwrap();
        assert_eq!(vals, vec![1.0, 1.0]);
        assert_eq!(u, CMatrix::identity(2));
    }

    #[test]
    fn two_by_two_real() {
        let m = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let (vals, _) = jacobi_hermitian(&m).unwrap();
        // characteristic polynomial (2−t)² − 1 has roots 1 and 3
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
        check_decomposition(&m);
    }

    #[test]
    fn complex_phases() {
        // [[1, i], [−i, 1]] has eigenvalues 0 and 2
        let m = CMatrix::from_vec(2, vec![c64(1.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(1.0, 0.0)]);
        let (vals, _) = jacobi_hermitian(&m).unwrap();
        assert!(vals[0].abs() < 1e-14 && (vals[1] - 2.0).abs() < 1e-14);
        check_decomposition(&m);

        let m = CMatrix::from_vec(
            3,
            vec![
                c64(2.0, 0.0), c64(1.0, -2.0), c64(0.5, 0.25),
                c64(1.0, 2.0), c64(-1.0, 0.0), c64(0.0, 3.0),
                c64(0.5, -0.25), c64(0.0, -3.0), c64(4.0, 0.0),
            ],
        );
        check_decomposition(&m);
    }

    #[test]
    fn degenerate_and_zero() {
        check_decomposition(&CMatrix::zeros(3));
        check_decomposition(&CMatrix::scalar(4, -2.5));
        let v = vec![c64(0.6, 0.0), c64(0.0, 0.8), c64(0.0, 0.0)];
        check_decomposition(&CMatrix::outer(&v));
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = CMatrix::identity(2);
        m[(0, 1)] = c64(f64::NAN, 0.0);
        assert!(matches!(jacobi_hermitian(&m), Err(Error::NonFinite)));
    }
}
