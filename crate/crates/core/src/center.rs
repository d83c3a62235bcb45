//! Executable forms of the center-affiliation equivalences.
//!
//! For bounded `a` the extended functional `m_a` is plain evaluation `φ ↦ φ(a)`.
//! Each check returns a signed gap `lhs − rhs` of one inequality; central `a`
//! keeps every gap `≤ 0` up to round-off, and a non-central `a` admits positive
//! gaps for every item. Gaps are compared against [`VIOLATION_THRESHOLD`] after
//! dividing by `‖a‖ · max ‖k‖₁` over the functionals involved.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{hermitian_eig, is_central, is_projection, BlockStructure, Operator};
use crate::error::{Error, Result};
use crate::functional::{is_positive, jordan_decompose, Functional};
use crate::matrix::{C64, CMatrix};
use crate::sampling::{gram_block, hermitian_block, projection_block, substream, unit_vector};
use crate::verify;

/// Normalized gaps above this count as violations.
pub const VIOLATION_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterItem {
    /// (ii) `p m_a p ≤ m_a`.
    Compression,
    /// (iii) `m_a(φ⁺) ≤ m_a(φ₁)` for any `φ = φ₁ − φ₂`.
    Minimality,
    /// (iv) `φ ≤ ψ ⇒ m_a(φ⁺) ≤ m_a(ψ⁺)`.
    Monotone,
    /// (v) `m_a((φ+ψ)⁺) ≤ m_a(φ⁺) + m_a(ψ⁺)`.
    SubaddPos,
    /// (vi) convexity of `φ ↦ m_a(φ⁺)`.
    ConvexPos,
    /// (vii) `m_a(|φ+ψ|) ≤ m_a(|φ|) + m_a(|ψ|)`.
    SubaddAbs,
    /// (viii) convexity of `φ ↦ m_a(|φ|)`.
    ConvexAbs,
}

impl CenterItem {
    pub const ALL: [CenterItem; 7] = [
        CenterItem::Compression,
        CenterItem::Minimality,
        CenterItem::Monotone,
        CenterItem::SubaddPos,
        CenterItem::ConvexPos,
        CenterItem::SubaddAbs,
        CenterItem::ConvexAbs,
    ];

    pub fn roman(self) -> &'static str {
        match self {
            CenterItem::Compression => "ii",
            CenterItem::Minimality => "iii",
            CenterItem::Monotone => "iv",
            CenterItem::SubaddPos => "v",
            CenterItem::ConvexPos => "vi",
            CenterItem::SubaddAbs => "vii",
            CenterItem::ConvexAbs => "viii",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CenterItem::Compression => "compression",
            CenterItem::Minimality => "minimality",
            CenterItem::Monotone => "monotone",
            CenterItem::SubaddPos => "subadd_pos",
            CenterItem::ConvexPos => "convex_pos",
            CenterItem::SubaddAbs => "subadd_abs",
            CenterItem::ConvexAbs => "convex_abs",
        }
    }
}

impl fmt::Display for CenterItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.roman())
    }
}

impl FromStr for CenterItem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CenterItem::ALL
            .into_iter()
            .find(|i| i.name() == s || i.roman() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown center item `{s}`")))
    }
}

/// Inputs that produced a gap.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CenterWitness {
    Compression { p: Operator, phi: Functional },
    Decomposition { phi1: Functional, phi2: Functional },
    Pair { phi: Functional, psi: Functional },
    Convex { phi: Functional, psi: Functional, lambda: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub item: CenterItem,
    pub gap: f64,
    pub normalized_gap: f64,
    pub witness: CenterWitness,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CenterCheckReport {
    pub item: CenterItem,
    pub samples: usize,
    pub violations: Vec<Violation>,
    /// Largest normalized gap seen, violation or not.
    pub max_normalized_gap: f64,
}

fn mass(phi: &Functional, a: &Operator) -> Result<f64> {
    Ok(phi.evaluate(a)?.re)
}

fn plus_mass(phi: &Functional, a: &Operator) -> Result<f64> {
    mass(&jordan_decompose(phi)?.plus, a)
}

fn abs_mass(phi: &Functional, a: &Operator) -> Result<f64> {
    mass(&jordan_decompose(phi)?.abs(), a)
}

fn require_positive(phi: &Functional) -> Result<()> {
    if is_positive(phi) {
        Ok(())
    } else {
        Err(Error::InvalidParameter("functional must be positive".into()))
    }
}

fn require_unit_interval(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("λ = {lambda} outside [0, 1]")))
    }
}

/// (ii): `(pφp)(a) − φ(a)` for positive `φ`.
pub fn check_compression(a: &Operator, p: &Operator, phi: &Functional) -> Result<f64> {
    require_positive(phi)?;
    if !is_projection(p) {
        return Err(Error::NotProjection);
    }
    a.structure().ensure_same(p.structure())?;
    let pkp = Functional::from_operator(&(&(p * &phi.density()) * p));
    Ok(mass(&pkp, a)? - mass(phi, a)?)
}

/// (iii): `φ⁺(a) − φ₁(a)` for `φ = φ₁ − φ₂`, both positive.
pub fn check_minimality(a: &Operator, phi1: &Functional, phi2: &Functional) -> Result<f64> {
    require_positive(phi1)?;
    require_positive(phi2)?;
    let phi = phi1 - phi2;
    Ok(plus_mass(&phi, a)? - mass(phi1, a)?)
}

/// (iv): `φ⁺(a) − ψ⁺(a)` for `φ ≤ ψ`.
pub fn check_monotone(a: &Operator, phi: &Functional, psi: &Functional) -> Result<f64> {
    require_positive(&(psi - phi)).map_err(|_| Error::InvalidParameter("monotonicity needs ψ − φ ≥ 0".into()))?;
    Ok(plus_mass(phi, a)? - plus_mass(psi, a)?)
}

/// (v): `(φ+ψ)⁺(a) − φ⁺(a) − ψ⁺(a)`.
pub fn check_subadd_pos(a: &Operator, phi: &Functional, psi: &Functional) -> Result<f64> {
    Ok(plus_mass(&(phi + psi), a)? - plus_mass(phi, a)? - plus_mass(psi, a)?)
}

/// (vi): `(λφ+(1−λ)ψ)⁺(a) − λφ⁺(a) − (1−λ)ψ⁺(a)`.
pub fn check_convex_pos(a: &Operator, phi: &Functional, psi: &Functional, lambda: f64) -> Result<f64> {
    require_unit_interval(lambda)?;
    let mix = &phi.scale(lambda) + &psi.scale(1.0 - lambda);
    Ok(plus_mass(&mix, a)? - lambda * plus_mass(phi, a)? - (1.0 - lambda) * plus_mass(psi, a)?)
}

/// (vii): `|φ+ψ|(a) − |φ|(a) − |ψ|(a)`.
pub fn check_subadd_abs(a: &Operator, phi: &Functional, psi: &Functional) -> Result<f64> {
    Ok(abs_mass(&(phi + psi), a)? - abs_mass(phi, a)? - abs_mass(psi, a)?)
}

/// (viii): `|λφ+(1−λ)ψ|(a) − λ|φ|(a) − (1−λ)|ψ|(a)`.
pub fn check_convex_abs(a: &Operator, phi: &Functional, psi: &Functional, lambda: f64) -> Result<f64> {
    require_unit_interval(lambda)?;
    let mix = &phi.scale(lambda) + &psi.scale(1.0 - lambda);
    Ok(abs_mass(&mix, a)? - lambda * abs_mass(phi, a)? - (1.0 - lambda) * abs_mass(psi, a)?)
}

/// Gap of `item` at `witness`.
pub fn evaluate_item(a: &Operator, item: CenterItem, witness: &CenterWitness) -> Result<f64> {
    use CenterItem::*;
    use CenterWitness as W;
    match (item, witness) {
        (Compression, W::Compression { p, phi }) => check_compression(a, p, phi),
        (Minimality, W::Decomposition { phi1, phi2 }) => check_minimality(a, phi1, phi2),
        (Monotone, W::Pair { phi, psi }) => check_monotone(a, phi, psi),
        (SubaddPos, W::Pair { phi, psi }) => check_subadd_pos(a, phi, psi),
        (SubaddAbs, W::Pair { phi, psi }) => check_subadd_abs(a, phi, psi),
        (ConvexPos, W::Convex { phi, psi, lambda }) => check_convex_pos(a, phi, psi, *lambda),
        (ConvexAbs, W::Convex { phi, psi, lambda }) => check_convex_abs(a, phi, psi, *lambda),
        _ => Err(Error::InvalidParameter(format!("witness kind does not fit item {item}"))),
    }
}

fn witness_scale(a: &Operator, witness: &CenterWitness) -> Result<f64> {
    let fs: Vec<&Functional> = match witness {
        CenterWitness::Compression { phi, .. } => vec![phi],
        CenterWitness::Decomposition { phi1, phi2 } => vec![phi1, phi2],
        CenterWitness::Pair { phi, psi } | CenterWitness::Convex { phi, psi, .. } => vec![phi, psi],
    };
    let mut k = 0.0_f64;
    for f in fs {
        k = k.max(f.norm()?);
    }
    Ok(a.operator_norm()? * k)
}

/// Gap with its normalization `‖a‖ · max ‖k‖₁`.
pub fn measure(a: &Operator, item: CenterItem, witness: CenterWitness) -> Result<Violation> {
    let gap = evaluate_item(a, item, &witness)?;
    let scale = witness_scale(a, &witness)?;
    let normalized_gap = if scale > 0.0 { gap / scale } else { 0.0 };
    Ok(Violation { item, gap, normalized_gap, witness })
}

/// Recomputes a gap from raw densities through [`crate::verify`], without the complex eigensolver.
pub fn reverify(a: &Operator, v: &Violation) -> Result<f64> {
    let blocks = a.blocks();
    let sum = |f: &dyn Fn(usize) -> f64| -> f64 { (0..blocks.len()).map(f).sum() };
    let kb = |phi: &Functional, b: usize| phi.k_blocks()[b].clone();
    let gap = match &v.witness {
        CenterWitness::Compression { p, phi } => sum(&|b| {
            let pkp = verify::compress_density(&kb(phi, b), p.block(b));
            verify::plain_mass(&pkp, &blocks[b]) - verify::plain_mass(&kb(phi, b), &blocks[b])
        }),
        CenterWitness::Decomposition { phi1, phi2 } => sum(&|b| {
            let k = &kb(phi1, b) - &kb(phi2, b);
            verify::positive_part_mass(&k, &blocks[b]) - verify::plain_mass(&kb(phi1, b), &blocks[b])
        }),
        CenterWitness::Pair { phi, psi } => {
            let pos = |k: &CMatrix, b: usize| verify::positive_part_mass(k, &blocks[b]);
            let abs = |k: &CMatrix, b: usize| verify::abs_mass(k, &blocks[b]);
            match v.item {
                CenterItem::Monotone => sum(&|b| pos(&kb(phi, b), b) - pos(&kb(psi, b), b)),
                CenterItem::SubaddPos => {
                    sum(&|b| pos(&(&kb(phi, b) + &kb(psi, b)), b) - pos(&kb(phi, b), b) - pos(&kb(psi, b), b))
                }
                CenterItem::SubaddAbs => {
                    sum(&|b| abs(&(&kb(phi, b) + &kb(psi, b)), b) - abs(&kb(phi, b), b) - abs(&kb(psi, b), b))
                }
                _ => return Err(Error::InvalidParameter("pair witness on a non-pair item".into())),
            }
        }
        CenterWitness::Convex { phi, psi, lambda } => {
            let l = *lambda;
            let f: &dyn Fn(&CMatrix, &CMatrix) -> f64 = match v.item {
                CenterItem::ConvexPos => &verify::positive_part_mass,
                CenterItem::ConvexAbs => &verify::abs_mass,
                _ => return Err(Error::InvalidParameter("convex witness on a non-convex item".into())),
            };
            sum(&|b| {
                let mix = &kb(phi, b).scale(l) + &kb(psi, b).scale(1.0 - l);
                f(&mix, &blocks[b]) - l * f(&kb(phi, b), &blocks[b]) - (1.0 - l) * f(&kb(psi, b), &blocks[b])
            })
        }
    };
    Ok(gap)
}

/// One random check of `item`: random Hermitian functionals, Gram matrices, projections, weights.
pub fn sample_witness(rng: &mut impl Rng, s: &BlockStructure, item: CenterItem) -> Result<CenterWitness> {
    let herm = |rng: &mut _| -> Result<Functional> {
        Functional::from_density(s.dims().iter().map(|&n| hermitian_block(rng, n)).collect())
    };
    let gram = |rng: &mut _| -> Result<Functional> {
        Functional::from_density(s.dims().iter().map(|&n| gram_block(rng, n)).collect())
    };
    Ok(match item {
        CenterItem::Compression => {
            let blocks = s
                .dims()
                .iter()
                .map(|&n| {
                    let r = rng.random_range(0..=n);
                    projection_block(rng, n, r)
                })
                .collect();
            CenterWitness::Compression { p: Operator::from_blocks(blocks)?, phi: gram(rng)? }
        }
        CenterItem::Minimality => {
            let phi = herm(rng)?;
            let r = gram(rng)?;
            let phi2 = shift_to_psd(&r, &(&phi + &r))?;
            CenterWitness::Decomposition { phi1: &phi + &phi2, phi2 }
        }
        CenterItem::Monotone => {
            let phi = herm(rng)?;
            let psi = &phi + &gram(rng)?;
            CenterWitness::Pair { phi, psi }
        }
        CenterItem::SubaddPos | CenterItem::SubaddAbs => CenterWitness::Pair { phi: herm(rng)?, psi: herm(rng)? },
        CenterItem::ConvexPos | CenterItem::ConvexAbs => {
            CenterWitness::Convex { phi: herm(rng)?, psi: herm(rng)?, lambda: rng.random::<f64>() }
        }
    })
}

/// `r + t·1` with the least `t ≥ 0` per block making both `r + t` and `other + t` PSD.
fn shift_to_psd(r: &Functional, other: &Functional) -> Result<Functional> {
    let blocks = r
        .k_blocks()
        .iter()
        .zip(other.k_blocks())
        .map(|(rb, ob)| {
            let lo = verify::hermitian_eigenvalues(rb)[0].min(verify::hermitian_eigenvalues(ob)[0]);
            let t = (-lo).max(0.0) * (1.0 + 1e-12) + 1e-13 * (1.0 + ob.max_abs());
            let mut m = rb.clone();
            for i in 0..m.dim() {
                m[(i, i)] += t;
            }
            m
        })
        .collect();
    Functional::from_density(blocks)
}

/// `samples` random checks per item; violations sorted by gap, largest first.
pub fn run_battery(a: &Operator, items: &[CenterItem], samples: usize, seed: u64) -> Result<Vec<CenterCheckReport>> {
    items
        .iter()
        .map(|&item| {
            let measured = (0..samples)
                .into_par_iter()
                .map(|t| {
                    let mut rng = substream(seed, &[0xCE47E2, item as u64, t as u64]);
                    let w = sample_witness(&mut rng, a.structure(), item)?;
                    measure(a, item, w)
                })
                .collect::<Result<Vec<_>>>()?;
            let max_normalized_gap = measured.iter().map(|v| v.normalized_gap).fold(f64::NEG_INFINITY, f64::max);
            let mut violations: Vec<Violation> =
                measured.into_iter().filter(|v| v.normalized_gap > VIOLATION_THRESHOLD).collect();
            sort_by_gap(&mut violations);
            Ok(CenterCheckReport { item, samples, violations, max_normalized_gap })
        })
        .collect()
}

fn sort_by_gap(v: &mut [Violation]) {
    v.sort_by(|x, y| y.gap.total_cmp(&x.gap).then(x.item.cmp(&y.item)));
}

/// Violations found by [`counterexample_search`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub trials: usize,
    pub seed: u64,
    /// Best violation per item, sorted by gap.
    pub violations: Vec<Violation>,
}

impl SearchOutcome {
    pub fn best(&self) -> Option<&Violation> {
        self.violations.first()
    }

    pub fn best_for(&self, item: CenterItem) -> Option<&Violation> {
        self.violations.iter().find(|v| v.item == item)
    }
}

fn state_in_block(s: &BlockStructure, b: usize, f: &[C64], weight: f64) -> Result<Functional> {
    let blocks = s
        .dims()
        .iter()
        .enumerate()
        .map(|(i, &n)| if i == b { CMatrix::outer(f).scale(weight) } else { CMatrix::zeros(n) })
        .collect();
    Functional::from_density(blocks)
}

fn projection_in_block(s: &BlockStructure, b: usize, f: &[C64]) -> Result<Operator> {
    let blocks = s
        .dims()
        .iter()
        .enumerate()
        .map(|(i, &n)| if i == b { CMatrix::outer(f) } else { CMatrix::zeros(n) })
        .collect();
    Operator::from_blocks(blocks)
}

/// Rank-one family in block `b`: `φ` a state at `f`, the second functional a state at
/// `v(θ) = cos θ·f + sin θ·g` with signed weight `w`.
struct RankOneFamily<'a> {
    s: &'a BlockStructure,
    b: usize,
    f: Vec<C64>,
    g: Vec<C64>,
    w1: f64,
    w2: f64,
}

impl RankOneFamily<'_> {
    fn rotated(&self, theta: f64) -> Vec<C64> {
        self.f.iter().zip(&self.g).map(|(x, y)| x * theta.cos() + y * theta.sin()).collect()
    }

    fn witness(&self, item: CenterItem, theta: f64) -> Result<CenterWitness> {
        let v = self.rotated(theta);
        let phi = state_in_block(self.s, self.b, &self.f, self.w1.abs().max(1e-3))?;
        Ok(match item {
            CenterItem::Compression => CenterWitness::Compression { p: projection_in_block(self.s, self.b, &v)?, phi },
            CenterItem::Minimality => CenterWitness::Decomposition {
                phi1: phi,
                phi2: state_in_block(self.s, self.b, &v, self.w2.abs().max(1e-3))?,
            },
            CenterItem::Monotone => {
                let psi = phi.clone();
                let phi = &psi - &state_in_block(self.s, self.b, &v, self.w2.abs().max(1e-3))?;
                CenterWitness::Pair { phi, psi }
            }
            CenterItem::SubaddPos | CenterItem::SubaddAbs => CenterWitness::Pair {
                phi: state_in_block(self.s, self.b, &self.f, self.w1)?,
                psi: state_in_block(self.s, self.b, &v, self.w2)?,
            },
            CenterItem::ConvexPos | CenterItem::ConvexAbs => CenterWitness::Convex {
                phi: state_in_block(self.s, self.b, &self.f, self.w1)?,
                psi: state_in_block(self.s, self.b, &v, self.w2)?,
                lambda: 0.5,
            },
        })
    }

    fn gap(&self, a: &Operator, item: CenterItem, theta: f64) -> Result<f64> {
        evaluate_item(a, item, &self.witness(item, theta)?)
    }

    /// Grid scan on `[0, π]` then golden-section refinement around the best grid point.
    fn maximize(&self, a: &Operator, item: CenterItem, grid: usize) -> Result<Violation> {
        let h = std::f64::consts::PI / grid as f64;
        let mut best = (0.0, f64::NEG_INFINITY);
        for i in 0..=grid {
            let t = i as f64 * h;
            let g = self.gap(a, item, t)?;
            if g > best.1 {
                best = (t, g);
            }
        }
        let (mut lo, mut hi) = (best.0 - h, best.0 + h);
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - r * (hi - lo);
        let mut x2 = lo + r * (hi - lo);
        let mut f1 = self.gap(a, item, x1)?;
        let mut f2 = self.gap(a, item, x2)?;
        for _ in 0..40 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + r * (hi - lo);
                f2 = self.gap(a, item, x2)?;
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - r * (hi - lo);
                f1 = self.gap(a, item, x1)?;
            }
        }
        let theta = if f1 > best.1 || f2 > best.1 { if f1 > f2 { x1 } else { x2 } } else { best.0 };
        measure(a, item, self.witness(item, theta)?)
    }
}

/// Heuristic search for inequalities broken by a non-central `a`.
///
/// The seed set scans, in every non-scalar block, the state at the bottom
/// eigenvector `u` against a state at `v(θ)` rotating toward the top
/// eigenvector. Random trials draw rank-one pairs from complex Gaussian unit
/// vectors with weights in `[−2, 2]` and refine the angle by golden section.
/// Per item, the largest violation is kept.
pub fn counterexample_search(a: &Operator, trials: usize, seed: u64) -> Result<SearchOutcome> {
    if is_central(a) {
        return Err(Error::CentralOperator);
    }
    a.require_hermitian()?;
    let s = a.structure();
    let sd = hermitian_eig(a)?;
    let noncentral: Vec<usize> = (0..s.len())
        .filter(|&b| {
            let single = Operator::single(a.block(b).clone()).expect("finite block");
            !is_central(&single)
        })
        .collect();

    let mut found: Vec<Violation> = Vec::new();
    for &b in &noncentral {
        let bs = &sd.blocks[b];
        let n = bs.values.len();
        let family = RankOneFamily { s, b, f: bs.vectors.column(0), g: bs.vectors.column(n - 1), w1: 1.0, w2: -1.0 };
        for item in CenterItem::ALL {
            found.push(family.maximize(a, item, 32)?);
        }
    }

    let random: Vec<Violation> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Violation> {
            let mut rng = substream(seed, &[0x5EA2C4, t as u64]);
            let b = noncentral[rng.random_range(0..noncentral.len())];
            let n = s.dims()[b];
            let f = unit_vector(&mut rng, n);
            let g = unit_vector(&mut rng, n);
            // orthonormalize g against f so θ sweeps a great circle
            let overlap: C64 = f.iter().zip(&g).map(|(x, y)| x.conj() * y).sum();
            let mut g: Vec<C64> = g.iter().zip(&f).map(|(y, x)| y - x * overlap).collect();
            let gn = crate::matrix::vec_norm(&g);
            if gn > 1e-12 {
                g.iter_mut().for_each(|z| *z /= gn);
            }
            let w1 = rng.random_range(-2.0..=2.0);
            let w2 = rng.random_range(-2.0..=2.0);
            let item = CenterItem::ALL[rng.random_range(0..CenterItem::ALL.len())];
            let family = RankOneFamily { s, b, f, g, w1, w2 };
            family.maximize(a, item, 8)
        })
        .collect::<Result<Vec<_>>>()?;
    found.extend(random);

    let mut best: Vec<Violation> = Vec::new();
    for item in CenterItem::ALL {
        if let Some(v) = found
            .iter()
            .filter(|v| v.item == item && v.normalized_gap > VIOLATION_THRESHOLD)
            .max_by(|x, y| x.gap.total_cmp(&y.gap))
        {
            best.push(v.clone());
        }
    }
    sort_by_gap(&mut best);
    Ok(SearchOutcome { trials, seed, violations: best })
}
