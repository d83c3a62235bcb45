//! Finite-dimensional von Neumann algebras `M_{n_1} ⊕ … ⊕ M_{n_k}` and their elements.
//!
//! An [`Operator`] is a list of square complex blocks. Functional calculus goes
//! through [`SpectralDecomposition`], which keeps per-block eigenpairs; square
//! roots, support projections and the resolvent cutoff `λa(λ+a)⁻¹` are all
//! spectral maps of it.

use std::ops::{Add, Mul, Neg, Sub};

use crate::eig::{jacobi_hermitian, spectral_map};
use crate::error::{Error, Result};
use crate::matrix::{C64, CMatrix};

/// Tolerance for the Hermitian flag, relative to `1 + max |entry|`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues within `PSD_CUTOFF · spectral radius` of zero count as zero.
pub const PSD_CUTOFF: f64 = 1e-10;

/// Block side lengths of the algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockStructure {
    dims: Vec<usize>,
}

impl BlockStructure {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidStructure("no blocks".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidStructure(format!("zero block dimension in {dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub(crate) fn ensure_same(&self, other: &BlockStructure) -> Result<()> {
        if self != other {
            return Err(Error::StructureMismatch { left: self.dims.clone(), right: other.dims.clone() });
        }
        Ok(())
    }
}

/// Element of the block algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    structure: BlockStructure,
    blocks: Vec<CMatrix>,
    hermitian: bool,
}

impl Operator {
    pub fn from_blocks(blocks: Vec<CMatrix>) -> Result<Self> {
        let structure = BlockStructure::new(blocks.iter().map(CMatrix::dim).collect())?;
        if blocks.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite);
        }
        let hermitian = blocks.iter().all(|b| b.is_hermitian(HERMITIAN_TOL));
        Ok(Self { structure, blocks, hermitian })
    }

    /// One-block operator.
    pub fn single(m: CMatrix) -> Result<Self> {
        Self::from_blocks(vec![m])
    }

    /// One-block diagonal operator.
    pub fn diag(d: &[f64]) -> Self {
        Self::single(CMatrix::from_diag(d)).expect("diagonal with finite entries")
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::single(CMatrix::from_real_rows(rows))
    }

    pub fn identity(structure: &BlockStructure) -> Self {
        Self::scalar(structure, 1.0)
    }

    pub fn zeros(structure: &BlockStructure) -> Self {
        Self::scalar(structure, 0.0)
    }

    pub fn scalar(structure: &BlockStructure, c: f64) -> Self {
        let blocks = structure.dims().iter().map(|&n| CMatrix::scalar(n, c)).collect();
        Self { structure: structure.clone(), blocks, hermitian: true }
    }

    /// Central element `⊕ c_b · 1`.
    pub fn block_scalar(structure: &BlockStructure, values: &[f64]) -> Result<Self> {
        if values.len() != structure.len() {
            return Err(Error::InvalidParameter(format!(
                "{} scalars for {} blocks",
                values.len(),
                structure.len()
            )));
        }
        let blocks = structure.dims().iter().zip(values).map(|(&n, &c)| CMatrix::scalar(n, c)).collect();
        Self::from_blocks(blocks)
    }

    pub fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &CMatrix {
        &self.blocks[b]
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn adjoint(&self) -> Self {
        Self::rebuilt(&self.structure, self.blocks.iter().map(CMatrix::adjoint).collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::rebuilt(&self.structure, self.blocks.iter().map(|b| b.scale(c)).collect())
    }

    /// Largest entry magnitude over all blocks.
    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().fold(0.0, |m, b| m.max(b.max_abs()))
    }

    /// Spectral (operator) norm, the maximum over blocks.
    pub fn operator_norm(&self) -> Result<f64> {
        if self.hermitian {
            return Ok(hermitian_eig(self)?.spectral_radius());
        }
        let gram = &self.adjoint() * self;
        let gram = Self::rebuilt(&gram.structure, gram.blocks.iter().map(CMatrix::hermitian_part).collect());
        Ok(hermitian_eig(&gram)?.max_eigenvalue().max(0.0).sqrt())
    }

    pub(crate) fn rebuilt(structure: &BlockStructure, blocks: Vec<CMatrix>) -> Self {
        let hermitian = blocks.iter().all(|b| b.is_hermitian(HERMITIAN_TOL));
        Self { structure: structure.clone(), blocks, hermitian }
    }

    fn zip_with(&self, rhs: &Operator, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Operator {
        assert_eq!(self.structure, rhs.structure, "operator structures differ");
        Self::rebuilt(&self.structure, self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| f(a, b)).collect())
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        if self.hermitian {
            Ok(())
        } else {
            Err(Error::NotHermitian)
        }
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.zip_with(rhs, |a, b| a * b)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(-1.0)
    }
}

/// Eigenpairs of one Hermitian block.
#[derive(Clone, Debug)]
pub struct BlockSpectrum {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column `j` belongs to `values[j]`.
    pub vectors: CMatrix,
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    structure: BlockStructure,
    pub blocks: Vec<BlockSpectrum>,
}

impl SpectralDecomposition {
    pub fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.values.first().copied()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.values.last().copied()).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.values.iter()).fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Absolute threshold below which eigenvalues count as zero.
    pub fn zero_cutoff(&self) -> f64 {
        PSD_CUTOFF * self.spectral_radius()
    }

    /// Functional calculus `f(x)`, block by block.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Operator {
        let blocks = self.blocks.iter().map(|b| spectral_map(&b.values, &b.vectors, &f)).collect();
        Operator::rebuilt(&self.structure, blocks)
    }

    pub fn reconstruct(&self) -> Operator {
        self.map(|x| x)
    }

    /// Per block, the eigenvectors whose eigenvalue passes `keep`.
    pub fn eigenvectors_where(&self, keep: impl Fn(f64) -> bool) -> Vec<Vec<Vec<C64>>> {
        self.blocks
            .iter()
            .map(|b| {
                b.values
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| keep(v))
                    .map(|(j, _)| b.vectors.column(j))
                    .collect()
            })
            .collect()
    }

    /// Orthonormal basis of the range, per block (eigenvalues above the zero cutoff).
    pub fn support_basis(&self) -> Vec<Vec<Vec<C64>>> {
        let cut = self.zero_cutoff();
        self.eigenvectors_where(|v| v > cut)
    }

    /// Orthonormal basis of the kernel, per block.
    pub fn kernel_basis(&self) -> Vec<Vec<Vec<C64>>> {
        let cut = self.zero_cutoff();
        self.eigenvectors_where(|v| v.abs() <= cut)
    }
}

/// Per-block Jacobi eigendecomposition of a Hermitian operator.
pub fn hermitian_eig(x: &Operator) -> Result<SpectralDecomposition> {
    x.require_hermitian()?;
    let blocks = x
        .blocks()
        .iter()
        .map(|b| jacobi_hermitian(b).map(|(values, vectors)| BlockSpectrum { values, vectors }))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralDecomposition { structure: x.structure().clone(), blocks })
}

/// Eigendecomposition of a positive operator.
///
/// Eigenvalues within `1e-10·‖x‖` of zero are set to exactly zero, so roots and
/// resolvents see the same kernel as [`SpectralDecomposition::kernel_basis`].
pub fn positive_eig(x: &Operator) -> Result<SpectralDecomposition> {
    let mut sd = hermitian_eig(x)?;
    let cut = sd.zero_cutoff();
    let min = sd.min_eigenvalue();
    if min < -cut {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    for b in &mut sd.blocks {
        for v in &mut b.values {
            *v = if *v <= cut { 0.0 } else { *v };
        }
    }
    Ok(sd)
}

/// Positive square root.
pub fn op_sqrt(x: &Operator) -> Result<Operator> {
    Ok(positive_eig(x)?.map(f64::sqrt))
}

/// Projection `q` onto the range of `a` (orthogonal complement of the kernel).
pub fn support_projection(a: &Operator) -> Result<Operator> {
    let sd = positive_eig(a)?;
    let cut = sd.zero_cutoff();
    Ok(sd.map(|v| if v > cut { 1.0 } else { 0.0 }))
}

/// Whether `p` is a Hermitian idempotent within `1e-9`.
pub fn is_projection(p: &Operator) -> bool {
    if !p.is_hermitian() {
        return false;
    }
    let sq = p * p;
    p.blocks().iter().zip(sq.blocks()).all(|(a, b)| (a - b).max_abs() <= 1e-9)
}

/// Orthonormal range basis of each block of a projection.
pub(crate) fn projection_range(p: &Operator) -> Result<Vec<Vec<Vec<C64>>>> {
    if !is_projection(p) {
        return Err(Error::NotProjection);
    }
    Ok(hermitian_eig(p)?.eigenvectors_where(|v| v > 0.5))
}

/// `x_p = pxp|_{pH}`: the compression re-expressed in an orthonormal basis of `range(p)`.
///
/// Blocks where `p` vanishes drop out of the result; a zero projection is an error.
pub fn compress(x: &Operator, p: &Operator) -> Result<Operator> {
    x.structure().ensure_same(p.structure())?;
    let bases = projection_range(p)?;
    compress_onto(x, &bases).ok_or(Error::ZeroProjection)
}

/// Congruence onto per-block bases, dropping empty blocks. `None` when all are empty.
pub(crate) fn compress_onto(x: &Operator, bases: &[Vec<Vec<C64>>]) -> Option<Operator> {
    let blocks: Vec<CMatrix> = x
        .blocks()
        .iter()
        .zip(bases)
        .filter(|(_, basis)| !basis.is_empty())
        .map(|(b, basis)| b.congruence(basis))
        .collect();
    if blocks.is_empty() {
        return None;
    }
    Some(Operator::from_blocks(blocks).expect("compression of a finite operator"))
}

/// `x ≤ y` in the positive-semidefinite order.
pub fn psd_leq(x: &Operator, y: &Operator) -> Result<bool> {
    x.structure().ensure_same(y.structure())?;
    x.require_hermitian()?;
    y.require_hermitian()?;
    let diff = y - x;
    let sd = hermitian_eig(&diff)?;
    Ok(sd.min_eigenvalue() >= -PSD_CUTOFF * (1.0 + sd.spectral_radius()))
}

/// Resolvent cutoff `a_λ = λa(λ+a)⁻¹`, a bounded approximation of `a` from below.
pub fn resolvent_cutoff(a: &Operator, lambda: f64) -> Result<Operator> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("cutoff λ must be positive, got {lambda}")));
    }
    Ok(positive_eig(a)?.map(|t| lambda * t / (lambda + t)))
}

/// Whether `a` lies in the center, i.e. every block is a multiple of the identity.
pub fn is_central(a: &Operator) -> bool {
    a.blocks().iter().all(|b| {
        let n = b.dim();
        let tol = 1e-10 * (1.0 + b.max_abs());
        let d0 = b[(0, 0)];
        (0..n).all(|i| {
            (0..n).all(|j| {
                let want = if i == j { d0 } else { C64::new(0.0, 0.0) };
                (b[(i, j)] - want).norm() <= tol
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;

    fn close(a: &Operator, b: &Operator, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn structure_validation() {
        assert!(BlockStructure::new(vec![]).is_err());
        assert!(BlockStructure::new(vec![2, 0]).is_err());
        assert_eq!(BlockStructure::new(vec![2, 1]).unwrap().total_dim(), 3);
    }

    #[test]
    fn eig_examples() {
        let sd = hermitian_eig(&Operator::diag(&[4.0, 9.0])).unwrap();
        assert_eq!(sd.blocks[0].values, vec![4.0, 9.0]);
        assert_eq!(sd.blocks[0].vectors, CMatrix::identity(2));

        let x = Operator::from_real_rows(&[&[2.0, 5.0], &[1.0, 3.0]]).unwrap();
        assert!(matches!(hermitian_eig(&x), Err(Error::NotHermitian)));
    }

    #[test]
    fn sqrt_examples() {
        assert!(close(&op_sqrt(&Operator::diag(&[4.0, 9.0])).unwrap(), &Operator::diag(&[2.0, 3.0]), 1e-14));
        assert!(close(&op_sqrt(&Operator::diag(&[0.0, 0.0])).unwrap(), &Operator::diag(&[0.0, 0.0]), 0.0));
        let m = Operator::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let r3 = 3f64.sqrt();
        let want = Operator::from_real_rows(&[&[(r3 + 1.0) / 2.0, (r3 - 1.0) / 2.0], &[(r3 - 1.0) / 2.0, (r3 + 1.0) / 2.0]]).unwrap();
        assert!(close(&op_sqrt(&m).unwrap(), &want, 1e-13));
        let neg = Operator::diag(&[1.0, -0.5]);
        assert!(matches!(op_sqrt(&neg), Err(Error::NotPositive { .. })));
        // round-off sized negatives are clamped
        assert!(op_sqrt(&Operator::diag(&[1.0, -1e-13])).is_ok());
    }

    #[test]
    fn support_examples() {
        assert!(close(&support_projection(&Operator::diag(&[1.0, 0.0])).unwrap(), &Operator::diag(&[1.0, 0.0]), 1e-15));
        assert!(close(&support_projection(&Operator::diag(&[3.0, 2.0])).unwrap(), &Operator::diag(&[1.0, 1.0]), 1e-15));
        let q = support_projection(&Operator::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap()).unwrap();
        let want = Operator::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        assert!(close(&q, &want, 1e-13));
        assert!(is_projection(&q));
    }

    #[test]
    fn compress_examples() {
        let x = Operator::from_real_rows(&[&[2.0, 5.0], &[5.0, 3.0]]).unwrap();
        let c = compress(&x, &Operator::diag(&[1.0, 0.0])).unwrap();
        assert_eq!(c.structure().dims(), &[1]);
        assert!((c.block(0)[(0, 0)].re - 2.0).abs() < 1e-15);

        let c = compress(&x, &Operator::diag(&[1.0, 1.0])).unwrap();
        // the basis is the eigenbasis of the identity, i.e. the standard one
        assert!(close(&c, &x, 1e-15));

        let v = [c64(0.6, 0.0), c64(0.8, 0.0)];
        let p = Operator::single(CMatrix::outer(&v)).unwrap();
        let c = compress(&Operator::diag(&[1.0, 4.0]), &p).unwrap();
        assert!((c.block(0)[(0, 0)].re - 2.92).abs() < 1e-12);

        assert!(matches!(compress(&x, &Operator::diag(&[1.0, 0.5])), Err(Error::NotProjection)));
        assert!(matches!(compress(&x, &Operator::diag(&[0.0, 0.0])), Err(Error::ZeroProjection)));
    }

    #[test]
    fn compress_drops_empty_blocks() {
        let s = BlockStructure::new(vec![2, 1]).unwrap();
        let x = Operator::block_scalar(&s, &[2.0, 7.0]).unwrap();
        let p = Operator::from_blocks(vec![CMatrix::zeros(2), CMatrix::identity(1)]).unwrap();
        let c = compress(&x, &p).unwrap();
        assert_eq!(c.structure().dims(), &[1]);
        assert!((c.block(0)[(0, 0)].re - 7.0).abs() < 1e-15);
    }

    #[test]
    fn order_examples() {
        assert!(psd_leq(&Operator::diag(&[1.0, 1.0]), &Operator::diag(&[2.0, 2.0])).unwrap());
        assert!(!psd_leq(&Operator::diag(&[1.0, 4.0]), &Operator::diag(&[4.0, 1.0])).unwrap());
        let m = Operator::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        assert!(psd_leq(&m, &Operator::diag(&[3.0, 3.0])).unwrap());
        assert!(matches!(
            psd_leq(&m, &Operator::diag(&[3.0])),
            Err(Error::StructureMismatch { .. })
        ));
    }

    #[test]
    fn resolvent_examples() {
        let r = resolvent_cutoff(&Operator::diag(&[1.0, 2.0]), 2.0).unwrap();
        assert!(close(&r, &Operator::diag(&[2.0 / 3.0, 1.0]), 1e-15));
        let r = resolvent_cutoff(&Operator::diag(&[0.0, 0.0]), 5.0).unwrap();
        assert_eq!(r.max_abs(), 0.0);
        let m = Operator::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let r = resolvent_cutoff(&m, 1.0).unwrap();
        let vals = &hermitian_eig(&r).unwrap().blocks[0].values;
        assert!((vals[0] - 0.5).abs() < 1e-14 && (vals[1] - 0.75).abs() < 1e-14);
        assert!(resolvent_cutoff(&m, 0.0).is_err());
        assert!(resolvent_cutoff(&m, -1.0).is_err());
    }

    #[test]
    fn centrality_examples() {
        assert!(is_central(&Operator::diag(&[2.0, 2.0])));
        assert!(!is_central(&Operator::diag(&[1.0, 4.0])));
        let s = BlockStructure::new(vec![2, 1]).unwrap();
        assert!(is_central(&Operator::block_scalar(&s, &[2.0, 5.0]).unwrap()));
        // commutator of diag(1,4) with the flip is nonzero
        let a = Operator::diag(&[1.0, 4.0]);
        let flip = Operator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!((&(&a * &flip) - &(&flip * &a)).max_abs() > 1.0);
    }

    #[test]
    fn operator_norm_of_non_hermitian() {
        let x = Operator::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!((x.operator_norm().unwrap() - 2.0).abs() < 1e-14);
    }
}
