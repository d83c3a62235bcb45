//! A second, independent numerical route for spectral quantities.
//!
//! Complex Hermitian `m` is mapped to the real symmetric `R(m) = [[Re m, −Im m], [Im m, Re m]]`.
//! `R` is a *-homomorphism that doubles every eigenvalue's multiplicity, so
//! `tr f(m) = ½ tr f(R(m))`, `R(|m|) = |R(m)|`, and `Re tr(xy) = ½ tr(R(x)R(y))`.
//! Everything here runs on plain `Vec<Vec<f64>>` with its own real Jacobi
//! solver and never touches the complex eigensolver or cached decompositions.

use crate::matrix::CMatrix;

type RealMat = Vec<Vec<f64>>;

pub fn realify(m: &CMatrix) -> RealMat {
    let n = m.dim();
    let mut r = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            r[i][j] = z.re;
            r[i][n + j] = -z.im;
            r[n + i][j] = z.im;
            r[n + i][n + j] = z.re;
        }
    }
    r
}

/// Eigenvalues and eigenvectors (as columns of the returned matrix) of a real symmetric matrix.
#[allow(clippy::needless_range_loop)]
pub fn symmetric_jacobi(mut a: RealMat) -> (Vec<f64>, RealMat) {
    let n = a.len();
    let mut v: RealMat = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return (vec![0.0; n], v);
    }
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off < 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

fn spectral_apply(vals: &[f64], vecs: &RealMat, f: impl Fn(f64) -> f64) -> RealMat {
    let n = vals.len();
    let mut out = vec![vec![0.0; n]; n];
    for (k, &l) in vals.iter().enumerate() {
        let w = f(l);
        if w == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                out[i][j] += w * vecs[i][k] * vecs[j][k];
            }
        }
    }
    out
}

fn trace_prod(x: &RealMat, y: &RealMat) -> f64 {
    let n = x.len();
    (0..n).map(|i| (0..n).map(|k| x[i][k] * y[k][i]).sum::<f64>()).sum()
}

/// Eigenvalues of a Hermitian matrix via the realification (each listed once).
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let (mut vals, _) = symmetric_jacobi(realify(&m.hermitian_part()));
    vals.sort_by(f64::total_cmp);
    vals.into_iter().step_by(2).collect()
}

/// `‖m‖₁` for Hermitian `m`.
pub fn hermitian_trace_norm(m: &CMatrix) -> f64 {
    let (vals, _) = symmetric_jacobi(realify(&m.hermitian_part()));
    0.5 * vals.iter().map(|v| v.abs()).sum::<f64>()
}

/// `tr(|k| a)` for Hermitian `k`.
pub fn abs_mass(k: &CMatrix, a: &CMatrix) -> f64 {
    let (vals, vecs) = symmetric_jacobi(realify(&k.hermitian_part()));
    let abs_k = spectral_apply(&vals, &vecs, f64::abs);
    0.5 * trace_prod(&abs_k, &realify(a))
}

/// `tr(k⁺ a)` for Hermitian `k`.
pub fn positive_part_mass(k: &CMatrix, a: &CMatrix) -> f64 {
    let (vals, vecs) = symmetric_jacobi(realify(&k.hermitian_part()));
    let plus = spectral_apply(&vals, &vecs, |v| v.max(0.0));
    0.5 * trace_prod(&plus, &realify(a))
}

/// `Re tr(k a)`.
pub fn plain_mass(k: &CMatrix, a: &CMatrix) -> f64 {
    0.5 * trace_prod(&realify(k), &realify(a))
}

/// `‖a^{1/2} k a^{1/2}‖₁` for PSD `a` and Hermitian `k`; the root is taken on the realification.
pub fn sandwich_trace_norm(k: &CMatrix, a: &CMatrix) -> f64 {
    let (vals, vecs) = symmetric_jacobi(realify(&a.hermitian_part()));
    let root = spectral_apply(&vals, &vecs, |t| t.max(0.0).sqrt());
    let h = mat_mul(&mat_mul(&root, &realify(&k.hermitian_part())), &root);
    let (hv, _) = symmetric_jacobi(h);
    0.5 * hv.iter().map(|v| v.abs()).sum::<f64>()
}

fn mat_mul(x: &RealMat, y: &RealMat) -> RealMat {
    let n = x.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let xik = x[i][k];
            if xik != 0.0 {
                for j in 0..n {
                    out[i][j] += xik * y[k][j];
                }
            }
        }
    }
    out
}

/// `p k p` for a projection `p`, i.e. the density of `x ↦ φ(pxp)`.
pub fn compress_density(k: &CMatrix, p: &CMatrix) -> CMatrix {
    &(p * k) * p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;

    #[test]
    fn realified_spectrum_matches_known_values() {
        let m = CMatrix::from_vec(2, vec![c64(1.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(1.0, 0.0)]);
        let vals = hermitian_eigenvalues(&m);
        assert!(vals[0].abs() < 1e-14 && (vals[1] - 2.0).abs() < 1e-14);
        assert!((hermitian_trace_norm(&m) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn abs_and_positive_masses() {
        // k = e1e1* − vv*, v = (0.6, 0.8): |k| = 0.8·1
        let e1 = CMatrix::from_diag(&[1.0, 0.0]);
        let v = CMatrix::outer(&[c64(0.6, 0.0), c64(0.8, 0.0)]);
        let k = &e1 - &v;
        let a = CMatrix::from_diag(&[1.0, 4.0]);
        assert!((abs_mass(&k, &a) - 4.0).abs() < 1e-13);
        assert!((positive_part_mass(&k, &a) - 0.5 * (4.0 + plain_mass(&k, &a))).abs() < 1e-13);
        // diag(1,4) against diag(1,−1): |1·1| + |4·(−1)|
        assert!((sandwich_trace_norm(&CMatrix::from_diag(&[1.0, -1.0]), &a) - 5.0).abs() < 1e-13);
    }
}
