//! The a-seminorm on Hermitian functionals and its dual on form classes.
//!
//! Two independent routes to `‖φ‖_a`:
//!
//! * [`closed_a_norm`]: the trace norm of `a^{1/2} k a^{1/2}`.
//! * [`decomposition_infimum`]: an explicit splitting `φ = φ₁ − φ₂` into positive
//!   functionals whose cost `φ₁(a) + φ₂(a)` reaches the infimum, together with a
//!   randomized audit over other valid splittings that must never undercut it.
//!
//! The dual side works with classes of forms `a^{1/2} x a^{1/2}`; two operators
//! induce the same class exactly when their compressions to the support of `a`
//! agree, and the class norm is the operator norm of that compression.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{compress_onto, positive_eig, BlockStructure, Operator, SpectralDecomposition, PSD_CUTOFF};
use crate::eig::jacobi_hermitian;
use crate::error::{Error, Result};
use crate::functional::{hermitian_sign, is_positive, jordan_decompose, sandwich_with_root, Functional};
use crate::matrix::{C64, CMatrix};
use crate::sampling::{gram_block, hermitian_block, substream};

/// Absolute margin by which an audited decomposition may undercut the certified value.
pub const AUDIT_MARGIN: f64 = 1e-9;
/// Slack spent on cross terms between the support and the kernel of `a`, relative to `1 + value`.
pub const DEFAULT_SLACK: f64 = 1e-6;

/// `‖φ‖_a = Σ_b ‖(a^{1/2} k a^{1/2})_b‖₁`.
pub fn closed_a_norm(a: &Operator, phi: &Functional) -> Result<f64> {
    a.structure().ensure_same(phi.structure())?;
    phi.require_hermitian()?;
    let root = positive_eig(a)?.map(f64::sqrt);
    sandwich_with_root(&root, phi).norm()
}

/// `a^{1/2} x a^{1/2}` up to the null space of the dual seminorm.
#[derive(Clone, Debug)]
pub struct FormClass {
    a: Operator,
    x: Operator,
    compressed: Option<Operator>,
}

impl FormClass {
    pub fn new(a: &Operator, x: &Operator) -> Result<Self> {
        a.structure().ensure_same(x.structure())?;
        let sd = positive_eig(a)?;
        let compressed = compress_onto(x, &sd.support_basis());
        Ok(Self { a: a.clone(), x: x.clone(), compressed })
    }

    pub fn a(&self) -> &Operator {
        &self.a
    }

    pub fn x(&self) -> &Operator {
        &self.x
    }

    /// `x_q`, or `None` when `a = 0`.
    pub fn compressed(&self) -> Option<&Operator> {
        self.compressed.as_ref()
    }

    /// `‖x_q‖`.
    pub fn norm(&self) -> Result<f64> {
        match &self.compressed {
            Some(c) => c.operator_norm(),
            None => Ok(0.0),
        }
    }

    /// Same class, i.e. the compressions agree within `tol`.
    pub fn same_class(&self, other: &FormClass, tol: f64) -> bool {
        match (&self.compressed, &other.compressed) {
            (None, None) => true,
            (Some(x), Some(y)) => x.structure() == y.structure() && (x - y).max_abs() <= tol,
            _ => false,
        }
    }
}

/// `‖x‖^a = inf{λ : −λa ≤ a^{1/2}xa^{1/2} ≤ λa}`, evaluated as `‖x_q‖`.
pub fn dual_a_norm(a: &Operator, x: &Operator) -> Result<f64> {
    x.require_hermitian()?;
    FormClass::new(a, x)?.norm()
}

/// `(a^{1/2} φ a^{1/2})(x) = tr(a^{1/2} k a^{1/2} x)`.
pub fn pairing(a: &Operator, phi: &Functional, x: &Operator) -> Result<C64> {
    a.structure().ensure_same(phi.structure())?;
    a.structure().ensure_same(x.structure())?;
    let root = positive_eig(a)?.map(f64::sqrt);
    sandwich_with_root(&root, phi).evaluate(x)
}

/// Partial isometry `u = s(h⁺) − s(h⁻)` for `h = a^{1/2} k a^{1/2}`.
///
/// `‖u‖^a ≤ 1` and `pairing(a, φ, u) = ‖φ‖_a`, so `u` attains the dual supremum.
pub fn polar_witness(a: &Operator, phi: &Functional) -> Result<Operator> {
    a.structure().ensure_same(phi.structure())?;
    phi.require_hermitian()?;
    let root = positive_eig(a)?.map(f64::sqrt);
    let h = sandwich_with_root(&root, phi);
    let blocks = h.k_blocks().iter().map(hermitian_sign).collect::<Result<Vec<_>>>()?;
    Operator::from_blocks(blocks)
}

/// `a^{-1/2} h a^{-1/2}`; inverse of the sandwich map for injective `a`.
pub fn unsandwich(a: &Operator, h: &Functional) -> Result<Functional> {
    a.structure().ensure_same(h.structure())?;
    let sd = positive_eig(a)?;
    if !is_injective_sd(&sd) {
        return Err(Error::NotInjective);
    }
    let inv_root = sd.map(|t| 1.0 / t.sqrt());
    Ok(sandwich_with_root(&inv_root, h))
}

fn is_injective_sd(sd: &SpectralDecomposition) -> bool {
    let cut = sd.zero_cutoff();
    sd.min_eigenvalue() > cut
}

pub fn is_injective(a: &Operator) -> Result<bool> {
    Ok(is_injective_sd(&positive_eig(a)?))
}

/// Unit-norm vector state on a kernel vector of `a`, if the kernel is nontrivial.
///
/// Its seminorm is `⟨af, f⟩ = 0`, so `‖·‖_a` fails to be a norm.
pub fn kernel_witness(a: &Operator) -> Result<Option<Functional>> {
    let sd = positive_eig(a)?;
    let kernels = sd.kernel_basis();
    let Some(b) = kernels.iter().position(|k| !k.is_empty()) else {
        return Ok(None);
    };
    let f = &kernels[b][0];
    let blocks = a
        .structure()
        .dims()
        .iter()
        .enumerate()
        .map(|(i, &n)| if i == b { CMatrix::outer(f) } else { CMatrix::zeros(n) })
        .collect();
    Functional::from_density(blocks).map(Some)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityCheck {
    pub is_positive: bool,
    pub identity_holds: bool,
    pub a_norm: f64,
    pub value_at_a: f64,
}

/// For injective `a`: `φ ≥ 0` exactly when `‖φ‖_a = φ(a)`.
pub fn positivity_identity(a: &Operator, phi: &Functional) -> Result<PositivityCheck> {
    phi.require_hermitian()?;
    if !is_injective(a)? {
        return Err(Error::NotInjective);
    }
    let a_norm = closed_a_norm(a, phi)?;
    let value_at_a = phi.evaluate(a)?.re;
    let check = PositivityCheck {
        is_positive: is_positive(phi),
        identity_holds: (a_norm - value_at_a).abs() <= 1e-9 * (1.0 + a_norm),
        a_norm,
        value_at_a,
    };
    if check.is_positive != check.identity_holds {
        return Err(Error::IdentityViolation(format!(
            "positivity {} but ‖φ‖_a = {a_norm} vs φ(a) = {value_at_a}",
            check.is_positive
        )));
    }
    Ok(check)
}

/// Achieving decomposition for `‖φ‖_a` plus the audit result.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormCertificate {
    pub value: f64,
    pub witness_plus: Functional,
    pub witness_minus: Functional,
    /// Smallest `φ₁(a) + φ₂(a)` seen among audited decompositions; `None` without trials.
    pub audit_floor: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Extra cost allowed for the witnesses above `value`.
    pub slack: f64,
}

impl NormCertificate {
    /// `witness_plus(a) + witness_minus(a)`.
    pub fn witness_cost(&self, a: &Operator) -> Result<f64> {
        Ok(self.witness_plus.evaluate(a)?.re + self.witness_minus.evaluate(a)?.re)
    }

    /// Largest entry of `witness_plus − witness_minus − φ`.
    pub fn reconstruction_error(&self, phi: &Functional) -> f64 {
        (&(&self.witness_plus - &self.witness_minus) - phi).density().max_abs()
    }
}

/// Certificate with the default cross-term slack.
pub fn decomposition_infimum(a: &Operator, phi: &Functional, audit_trials: usize, seed: u64) -> Result<NormCertificate> {
    decomposition_infimum_with_slack(a, phi, None, audit_trials, seed)
}

/// Explicit optimizer for `inf{φ₁(a) + φ₂(a) : φ = φ₁ − φ₂, φᵢ ≥ 0}`.
///
/// Per block, in an eigenbasis of `a` split into support `q` and kernel:
/// `h = a_q^{1/2} k_q a_q^{1/2} = h⁺ − h⁻`, and the support parts of the witnesses
/// are `a_q^{-1/2} h^± a_q^{-1/2}`, costing exactly `‖h‖₁`. The kernel corner of
/// `k` is split into its Jordan parts at zero cost. A cross term `c = q k (1−q)`
/// cannot be absorbed at zero cost (the infimum is then not attained); it is
/// carried by `[[ε, c], [c*, c*c/ε]] ≥ 0` in `φ₁` and `[[ε, 0], [0, c*c/ε]]` in
/// `φ₂`, which costs `2ε tr(a_q)`. `slack` bounds that cost; `None` uses
/// [`DEFAULT_SLACK`]` · (1 + value)`.
pub fn decomposition_infimum_with_slack(
    a: &Operator,
    phi: &Functional,
    slack: Option<f64>,
    audit_trials: usize,
    seed: u64,
) -> Result<NormCertificate> {
    a.structure().ensure_same(phi.structure())?;
    phi.require_hermitian()?;
    let value = closed_a_norm(a, phi)?;
    let slack = slack.unwrap_or(DEFAULT_SLACK * (1.0 + value));
    if !(slack >= 0.0 && slack.is_finite()) {
        return Err(Error::InvalidParameter(format!("slack must be nonnegative, got {slack}")));
    }
    let sd = positive_eig(a)?;
    let cut = sd.zero_cutoff();

    // tr(a_q) summed over all blocks with a cross term decides ε
    let mut cross_mass = 0.0;
    let mut layouts = Vec::with_capacity(a.structure().len());
    for (spec, k) in sd.blocks.iter().zip(phi.k_blocks()) {
        let layout = BlockLayout::new(spec, k, cut);
        if layout.has_cross_term() {
            cross_mass += layout.support_values.iter().sum::<f64>();
        }
        layouts.push(layout);
    }
    let eps = if cross_mass > 0.0 { slack / (2.0 * cross_mass) } else { 0.0 };
    if cross_mass > 0.0 && eps == 0.0 {
        return Err(Error::InvalidParameter("nonzero slack required when k couples support and kernel of a".into()));
    }

    let mut plus = Vec::with_capacity(layouts.len());
    let mut minus = Vec::with_capacity(layouts.len());
    for layout in &layouts {
        let (p, m) = layout.witnesses(eps)?;
        plus.push(p);
        minus.push(m);
    }
    let witness_plus = Functional::from_density(plus)?;
    let witness_minus = Functional::from_density(minus)?;

    let audit_floor = audit(a, phi, &witness_plus, &witness_minus, audit_trials, seed)?;
    if let Some(floor) = audit_floor {
        if floor < value - AUDIT_MARGIN {
            return Err(Error::IdentityViolation(format!(
                "audited decomposition costs {floor} < certified {value}"
            )));
        }
    }

    let cert = NormCertificate { value, witness_plus, witness_minus, audit_floor, trials: audit_trials, seed, slack };
    let cost = cert.witness_cost(a)?;
    if (cost - value).abs() > 1e-8 * (1.0 + value) + slack {
        return Err(Error::IdentityViolation(format!("witness cost {cost} differs from closed form {value}")));
    }
    Ok(cert)
}

/// One block of `k` expressed in an eigenbasis of `a`, support vectors first.
struct BlockLayout {
    basis: Vec<Vec<C64>>,
    support_values: Vec<f64>,
    /// `k` in `basis`.
    k: CMatrix,
}

impl BlockLayout {
    fn new(spec: &crate::algebra::BlockSpectrum, k: &CMatrix, cut: f64) -> Self {
        let n = spec.values.len();
        let mut support: Vec<usize> = (0..n).filter(|&j| spec.values[j] > cut).collect();
        let kernel: Vec<usize> = (0..n).filter(|&j| spec.values[j] <= cut).collect();
        let support_values = support.iter().map(|&j| spec.values[j]).collect();
        support.extend(kernel);
        let basis: Vec<Vec<C64>> = support.iter().map(|&j| spec.vectors.column(j)).collect();
        let k = k.congruence(&basis).hermitian_part();
        Self { basis, support_values, k }
    }

    fn rank(&self) -> usize {
        self.support_values.len()
    }

    fn n(&self) -> usize {
        self.basis.len()
    }

    fn corner(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Vec<Vec<C64>> {
        rows.map(|i| cols.clone().map(|j| self.k[(i, j)]).collect()).collect()
    }

    fn has_cross_term(&self) -> bool {
        let (r, n) = (self.rank(), self.n());
        let scale = 1.0 + self.k.max_abs();
        self.corner(0..r, r..n).iter().flatten().any(|z| z.norm() > 1e-14 * scale)
    }

    fn witnesses(&self, eps: f64) -> Result<(CMatrix, CMatrix)> {
        let (r, n) = (self.rank(), self.n());
        let mut plus = CMatrix::zeros(n);
        let mut minus = CMatrix::zeros(n);

        // support corner: a_q^{-1/2} h± a_q^{-1/2} with a_q diagonal in this basis
        if r > 0 {
            let roots: Vec<f64> = self.support_values.iter().map(|v| v.sqrt()).collect();
            let mut h = CMatrix::zeros(r);
            for i in 0..r {
                for j in 0..r {
                    h[(i, j)] = self.k[(i, j)] * roots[i] * roots[j];
                }
            }
            let (hp, hm) = jordan_block(&h.hermitian_part())?;
            for i in 0..r {
                for j in 0..r {
                    plus[(i, j)] = hp[(i, j)] / (roots[i] * roots[j]);
                    minus[(i, j)] = hm[(i, j)] / (roots[i] * roots[j]);
                }
            }
        }

        // kernel corner: Jordan parts, zero cost
        if r < n {
            let m = n - r;
            let mut d = CMatrix::zeros(m);
            for i in 0..m {
                for j in 0..m {
                    d[(i, j)] = self.k[(r + i, r + j)];
                }
            }
            let (dp, dm) = jordan_block(&d)?;
            for i in 0..m {
                for j in 0..m {
                    plus[(r + i, r + j)] = dp[(i, j)];
                    minus[(r + i, r + j)] = dm[(i, j)];
                }
            }
        }

        if self.has_cross_term() {
            let c = self.corner(0..r, r..n);
            for i in 0..r {
                plus[(i, i)] += eps;
                minus[(i, i)] += eps;
                for j in r..n {
                    plus[(i, j)] = c[i][j - r];
                    plus[(j, i)] = c[i][j - r].conj();
                }
            }
            // c*c / ε on the kernel corner, in both witnesses
            for p in 0..(n - r) {
                for q in 0..(n - r) {
                    let v: C64 = (0..r).map(|i| c[i][p].conj() * c[i][q]).sum::<C64>() / eps;
                    plus[(r + p, r + q)] += v;
                    minus[(r + p, r + q)] += v;
                }
            }
        }

        let plus = plus.lift(&self.basis, n).hermitian_part();
        let minus = minus.lift(&self.basis, n).hermitian_part();
        Ok((plus, minus))
    }
}

fn jordan_block(h: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let phi = Functional::from_density(vec![h.clone()])?;
    let j = jordan_decompose(&phi)?;
    Ok((j.plus.k_blocks()[0].clone(), j.minus.k_blocks()[0].clone()))
}

/// Which family of valid decompositions an audit trial draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditFamily {
    /// `φ₁ = φ⁺ + r`, `φ₂ = φ⁻ + r` with random Gram `r`.
    JordanShift,
    /// `φ₂ = R + t·1` with random Gram `R` and the least `t` making `φ + φ₂ ≥ 0`.
    Arbitrary,
    /// Small Hermitian perturbation of the optimal witnesses, shifted back into the cone.
    LocalPerturbation,
}

impl AuditFamily {
    pub fn for_trial(t: usize) -> Self {
        match t % 3 {
            0 => AuditFamily::JordanShift,
            1 => AuditFamily::Arbitrary,
            _ => AuditFamily::LocalPerturbation,
        }
    }
}

/// Cost `φ₁(a) + φ₂(a)` of one randomly drawn valid decomposition.
pub fn audit_trial(
    a: &Operator,
    phi: &Functional,
    jordan: (&Functional, &Functional),
    optimum: (&Functional, &Functional),
    seed: u64,
    trial: usize,
) -> Result<(f64, Functional, Functional)> {
    let mut rng = substream(seed, &[0xA0D17, trial as u64]);
    let scale = phi.norm()?.max(1e-300);
    let dims = a.structure().dims().to_vec();
    let structure = a.structure().clone();

    let (phi1, phi2) = match AuditFamily::for_trial(trial) {
        AuditFamily::JordanShift => {
            let target = rng_unit(&mut rng) * scale;
            let r = scaled_gram(&mut rng, &structure, target)?;
            (jordan.0 + &r, jordan.1 + &r)
        }
        AuditFamily::Arbitrary => {
            let target = rng_unit(&mut rng) * scale;
            let r = scaled_gram(&mut rng, &structure, target)?;
            let shifted = shift_into_cone(&[&(phi + &r)], &r)?;
            (phi + &shifted, shifted)
        }
        AuditFamily::LocalPerturbation => {
            let size = scale * 10f64.powf(-6.0 * rng_unit(&mut rng)) * 0.1;
            let delta: Vec<CMatrix> = dims.iter().map(|&n| hermitian_block(&mut rng, n)).collect();
            let delta = Functional::from_density(delta)?;
            let dn = delta.norm()?.max(1e-300);
            let delta = delta.scale(size / dn);
            let base = optimum.1 + &delta;
            let shifted = shift_into_cone(&[&(optimum.0 + &delta)], &base)?;
            (phi + &shifted, shifted)
        }
    };
    let cost = phi1.evaluate(a)?.re + phi2.evaluate(a)?.re;
    Ok((cost, phi1, phi2))
}

fn rng_unit(rng: &mut impl rand::Rng) -> f64 {
    rng.random::<f64>()
}

fn scaled_gram(rng: &mut impl rand::Rng, s: &BlockStructure, target: f64) -> Result<Functional> {
    let g = Functional::from_density(s.dims().iter().map(|&n| gram_block(rng, n)).collect())?;
    let tr: f64 = g.k_blocks().iter().map(|b| b.trace().re).sum();
    Ok(if tr > 0.0 { g.scale(target / tr) } else { g })
}

/// `base + t·1` per block with the least `t ≥ 0` making `base + t` and each `others[i] + t` PSD.
fn shift_into_cone(others: &[&Functional], base: &Functional) -> Result<Functional> {
    let mut blocks = Vec::with_capacity(base.k_blocks().len());
    for (b, kb) in base.k_blocks().iter().enumerate() {
        let mut t = -min_eig(kb)?;
        for o in others {
            t = t.max(-min_eig(&o.k_blocks()[b])?);
        }
        // clear round-off so the shifted blocks are PSD, not merely PSD up to tolerance
        let t = t.max(0.0) * (1.0 + 1e-12) + PSD_CUTOFF * 1e-3 * (1.0 + kb.max_abs());
        let mut m = kb.clone();
        for i in 0..m.dim() {
            m[(i, i)] += t;
        }
        blocks.push(m);
    }
    Functional::from_density(blocks)
}

fn min_eig(m: &CMatrix) -> Result<f64> {
    Ok(jacobi_hermitian(m)?.0.first().copied().unwrap_or(0.0))
}

fn audit(
    a: &Operator,
    phi: &Functional,
    witness_plus: &Functional,
    witness_minus: &Functional,
    trials: usize,
    seed: u64,
) -> Result<Option<f64>> {
    if trials == 0 {
        return Ok(None);
    }
    let j = jordan_decompose(phi)?;
    let costs = (0..trials)
        .into_par_iter()
        .map(|t| audit_trial(a, phi, (&j.plus, &j.minus), (witness_plus, witness_minus), seed, t).map(|r| r.0))
        .collect::<Result<Vec<f64>>>()?;
    Ok(costs.into_iter().reduce(f64::min))
}
