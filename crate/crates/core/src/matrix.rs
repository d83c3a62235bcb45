//! Dense square complex matrices, the storage behind every block.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn scalar(n: usize, c: f64) -> Self {
        Self::from_diag(&vec![c; n])
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major data. Panics if `data.len() != n * n`.
    pub fn from_vec(n: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data length must be n*n");
        Self { n, data }
    }

    /// Real matrix from rows. Panics on ragged or non-square input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "rows must form a square matrix");
            data.extend(r.iter().map(|&v| C64::new(v, 0.0)));
        }
        Self { n, data }
    }

    /// Complex matrix from separate real and imaginary row-major parts.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Option<Self> {
        let n = re.len();
        if im.len() != n || re.iter().chain(im.iter()).any(|r| r.len() != n) {
            return None;
        }
        let data = re
            .iter()
            .zip(im)
            .flat_map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| C64::new(a, b)))
            .collect();
        Some(Self { n, data })
    }

    /// Rank-one matrix `v v*`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn real_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.iter().map(|z| z.re).collect()).collect()
    }

    pub fn imag_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.iter().map(|z| z.im).collect()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn scale_c(&self, c: C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &CMatrix) -> C64 {
        assert_eq!(self.n, other.n);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.n {
            for k in 0..self.n {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    /// Frobenius mass strictly off the diagonal.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `‖M − M*‖_max ≤ tol · (1 + ‖M‖_max)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let bound = tol * (1.0 + self.max_abs());
        for i in 0..self.n {
            for j in i..self.n {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > bound {
                    return false;
                }
            }
        }
        true
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        m
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `V* M V` where the columns of `V` are `basis`; the result has side `basis.len()`.
    pub fn congruence(&self, basis: &[Vec<C64>]) -> Self {
        let r = basis.len();
        let mv: Vec<Vec<C64>> = basis.iter().map(|v| self.matvec(v)).collect();
        let mut out = Self::zeros(r);
        for i in 0..r {
            for j in 0..r {
                out[(i, j)] = basis[i].iter().zip(&mv[j]).map(|(u, w)| u.conj() * w).sum();
            }
        }
        out
    }

    /// `V M V*` for an `n×r` isometry `V` given by its columns; inverse of [`congruence`](Self::congruence).
    pub fn lift(&self, basis: &[Vec<C64>], n: usize) -> Self {
        assert_eq!(basis.len(), self.n);
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for (p, bp) in basis.iter().enumerate() {
                    for (q, bq) in basis.iter().enumerate() {
                        acc += bp[i] * self[(p, q)] * bq[j].conj();
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in product");
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in sum");
        CMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in difference");
        CMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix { n: self.n, data: self.data.iter().map(|z| -z).collect() }
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = self[(i, j)];
                    if z.im == 0.0 {
                        format!("{:.6}", z.re)
                    } else {
                        format!("{:.6}{:+.6}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_adjoint() {
        let a = CMatrix::from_vec(2, vec![c64(1.0, 1.0), c64(2.0, 0.0), c64(0.0, -1.0), c64(3.0, 0.0)]);
        let b = &a.adjoint() * &a;
        assert!(b.is_hermitian(1e-15));
        // tr(A*A) = ‖A‖_F²
        assert!((b.trace().re - a.frobenius_norm().powi(2)).abs() < 1e-12);
        assert!((a.trace_product(&a.adjoint()).re - b.trace().re).abs() < 1e-12);
    }

    #[test]
    fn congruence_then_lift_is_projection() {
        let v = vec![c64(0.6, 0.0), c64(0.8, 0.0)];
        let x = CMatrix::from_diag(&[1.0, 4.0]);
        let c = x.congruence(std::slice::from_ref(&v));
        assert!((c[(0, 0)].re - 2.92).abs() < 1e-12);
        let lifted = CMatrix::identity(1).lift(std::slice::from_ref(&v), 2);
        assert!((&lifted - &CMatrix::outer(&v)).max_abs() < 1e-15);
    }

    #[test]
    fn zero_sized_matrices_are_harmless() {
        let z = CMatrix::zeros(0);
        assert_eq!(z.trace(), c64(0.0, 0.0));
        assert_eq!((&z * &z).dim(), 0);
        assert!(z.real_rows().is_empty());
    }
}
