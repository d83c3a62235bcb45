//! Normal functionals on the block algebra, stored by density: `φ(x) = Σ_b tr(k_b x_b)`.

use std::ops::{Add, Sub};

use crate::algebra::{hermitian_eig, op_sqrt, BlockStructure, Operator, HERMITIAN_TOL, PSD_CUTOFF};
use crate::eig::{jacobi_hermitian, spectral_map};
use crate::error::{Error, Result};
use crate::matrix::{C64, CMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    structure: BlockStructure,
    k_blocks: Vec<CMatrix>,
    hermitian: bool,
}

impl Functional {
    pub fn from_density(k_blocks: Vec<CMatrix>) -> Result<Self> {
        let op = Operator::from_blocks(k_blocks)?;
        Ok(Self::from_operator(&op))
    }

    /// The functional whose density is `k`.
    pub fn from_operator(k: &Operator) -> Self {
        Self {
            structure: k.structure().clone(),
            k_blocks: k.blocks().to_vec(),
            hermitian: k.is_hermitian(),
        }
    }

    pub fn zeros(structure: &BlockStructure) -> Self {
        Self::from_operator(&Operator::zeros(structure))
    }

    pub fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    pub fn k_blocks(&self) -> &[CMatrix] {
        &self.k_blocks
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn density(&self) -> Operator {
        Operator::from_blocks(self.k_blocks.clone()).expect("density blocks are valid")
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_operator(&self.density().scale(c))
    }

    /// `φ(x) = Σ_b tr(k_b x_b)`.
    pub fn evaluate(&self, x: &Operator) -> Result<C64> {
        self.structure.ensure_same(x.structure())?;
        Ok(self.k_blocks.iter().zip(x.blocks()).map(|(k, xb)| k.trace_product(xb)).sum())
    }

    /// Functional norm `‖φ‖ = Σ_b ‖k_b‖₁` (trace norms).
    pub fn norm(&self) -> Result<f64> {
        self.k_blocks.iter().map(trace_norm).sum()
    }

    pub fn is_positive(&self) -> bool {
        is_positive(self)
    }

    pub fn require_hermitian(&self) -> Result<()> {
        if self.hermitian {
            Ok(())
        } else {
            Err(Error::NotHermitian)
        }
    }
}

impl Add for &Functional {
    type Output = Functional;
    fn add(self, rhs: &Functional) -> Functional {
        Functional::from_operator(&(&self.density() + &rhs.density()))
    }
}

impl Sub for &Functional {
    type Output = Functional;
    fn sub(self, rhs: &Functional) -> Functional {
        Functional::from_operator(&(&self.density() - &rhs.density()))
    }
}

/// Sum of singular values of one block.
pub fn trace_norm(k: &CMatrix) -> Result<f64> {
    if k.is_hermitian(HERMITIAN_TOL) {
        let (vals, _) = jacobi_hermitian(k)?;
        return Ok(vals.iter().map(|v| v.abs()).sum());
    }
    let gram = (&k.adjoint() * k).hermitian_part();
    let (vals, _) = jacobi_hermitian(&gram)?;
    Ok(vals.iter().map(|v| v.max(0.0).sqrt()).sum())
}

/// Canonical minimal splitting `φ = φ⁺ − φ⁻` with orthogonal supports.
#[derive(Clone, Debug)]
pub struct JordanPair {
    pub plus: Functional,
    pub minus: Functional,
}

impl JordanPair {
    /// `|φ| = φ⁺ + φ⁻`.
    pub fn abs(&self) -> Functional {
        &self.plus + &self.minus
    }

    pub fn reconstruct(&self) -> Functional {
        &self.plus - &self.minus
    }

    /// `Σ_b tr(k⁺_b k⁻_b)`; zero for orthogonal supports.
    pub fn support_overlap(&self) -> f64 {
        self.plus
            .k_blocks()
            .iter()
            .zip(self.minus.k_blocks())
            .map(|(p, m)| p.trace_product(m).re)
            .sum()
    }
}

/// Positive and negative spectral parts of a Hermitian density.
pub fn jordan_decompose(phi: &Functional) -> Result<JordanPair> {
    phi.require_hermitian()?;
    let sd = hermitian_eig(&phi.density())?;
    let cut = PSD_CUTOFF * sd.spectral_radius();
    let plus = sd.map(|v| if v > cut { v } else { 0.0 });
    let minus = sd.map(|v| if v < -cut { -v } else { 0.0 });
    Ok(JordanPair { plus: Functional::from_operator(&plus), minus: Functional::from_operator(&minus) })
}

/// Every density block is PSD up to `1e-10 · (1 + spectral radius)`.
pub fn is_positive(phi: &Functional) -> bool {
    if !phi.is_hermitian() {
        return false;
    }
    phi.k_blocks().iter().all(|k| match jacobi_hermitian(k) {
        Ok((vals, _)) => {
            let radius = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            vals.first().is_none_or(|&v| v >= -PSD_CUTOFF * (1.0 + radius))
        }
        Err(_) => false,
    })
}

/// The vector functional `x ↦ ⟨x f, f⟩`, density `f f*` per block.
pub fn vector_state(f: &[Vec<C64>], structure: &BlockStructure) -> Result<Functional> {
    if f.len() != structure.len() || f.iter().zip(structure.dims()).any(|(v, &n)| v.len() != n) {
        return Err(Error::InvalidParameter("vector is not conformal with the block structure".into()));
    }
    Functional::from_density(f.iter().map(|v| CMatrix::outer(v)).collect())
}

/// `a^{1/2} φ a^{1/2}`, density `a^{1/2} k a^{1/2}`.
pub fn a_sandwich(a: &Operator, phi: &Functional) -> Result<Functional> {
    a.structure().ensure_same(phi.structure())?;
    let root = op_sqrt(a)?;
    Ok(sandwich_with_root(&root, phi))
}

pub(crate) fn sandwich_with_root(root: &Operator, phi: &Functional) -> Functional {
    let blocks = root
        .blocks()
        .iter()
        .zip(phi.k_blocks())
        .map(|(r, k)| {
            let h = &(r * k) * r;
            if phi.is_hermitian() {
                h.hermitian_part()
            } else {
                h
            }
        })
        .collect();
    Functional::from_density(blocks).expect("sandwich of finite blocks")
}

/// Sign of a Hermitian block: `s(h⁺) − s(h⁻)` with the zero cutoff applied.
pub(crate) fn hermitian_sign(h: &CMatrix) -> Result<CMatrix> {
    let (vals, vecs) = jacobi_hermitian(h)?;
    let radius = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let cut = PSD_CUTOFF * radius;
    Ok(spectral_map(&vals, &vecs, |v| {
        if v > cut {
            1.0
        } else if v < -cut {
            -1.0
        } else {
            0.0
        }
    }))
}
