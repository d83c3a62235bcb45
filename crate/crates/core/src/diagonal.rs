//! Block-diagonal operators with unbounded block norms.
//!
//! Blocks are indexed from 1 and produced by a pure rule, so truncating to the
//! first `n` blocks plays the role of a spectral cutoff. Functionals are finitely
//! supported and therefore always have finite mass at `a`; weights are countable
//! sums of such functionals with an analytic tail bound supplied by the caller.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::sync::{Arc, Mutex};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{hermitian_eig, positive_eig, resolvent_cutoff, Operator};
use crate::anorm::{closed_a_norm, decomposition_infimum_with_slack};
use crate::error::{Error, Result};
use crate::functional::{is_positive, trace_norm, Functional};
use crate::io::BlockJson;
use crate::matrix::{C64, CMatrix};
use crate::sampling::{substream, with_spectrum};

/// How the `n`-th block of `a` is produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum BlockRule {
    /// `a_n = slope · n` on 1×1 blocks.
    Linear { slope: f64 },
    /// `a_n = n · B_n` on `dim × dim` blocks, `B_n` positive definite with `‖B_n‖ = 1`,
    /// spectrum in `[floor, 1]`, drawn from the stream `(seed, n)`.
    SeededPsd { dim: usize, seed: u64, floor: f64 },
}

impl BlockRule {
    fn validate(&self) -> Result<()> {
        match *self {
            BlockRule::Linear { slope } if slope > 0.0 && slope.is_finite() => Ok(()),
            BlockRule::SeededPsd { dim, floor, .. } if dim >= 1 && floor > 0.0 && floor <= 1.0 => Ok(()),
            _ => Err(Error::InvalidParameter(format!("invalid block rule {self:?}"))),
        }
    }
}

/// Positive block-diagonal operator `a = ⊕_{n≥1} a_n` with `‖a_n‖ → ∞`.
#[derive(Serialize, Deserialize)]
#[serde(try_from = "BlockRule", into = "BlockRule")]
pub struct UnboundedBlockOperator {
    rule: BlockRule,
    cache: Mutex<BTreeMap<usize, CMatrix>>,
}

impl Clone for UnboundedBlockOperator {
    fn clone(&self) -> Self {
        Self { rule: self.rule.clone(), cache: Mutex::new(self.cache.lock().expect("cache lock").clone()) }
    }
}

impl fmt::Debug for UnboundedBlockOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnboundedBlockOperator").field("rule", &self.rule).finish()
    }
}

impl PartialEq for UnboundedBlockOperator {
    fn eq(&self, other: &Self) -> bool {
        self.rule == other.rule
    }
}

impl TryFrom<BlockRule> for UnboundedBlockOperator {
    type Error = Error;
    fn try_from(rule: BlockRule) -> Result<Self> {
        rule.validate()?;
        Ok(Self { rule, cache: Mutex::new(BTreeMap::new()) })
    }
}

impl From<UnboundedBlockOperator> for BlockRule {
    fn from(a: UnboundedBlockOperator) -> Self {
        a.rule
    }
}

impl UnboundedBlockOperator {
    pub fn new(rule: BlockRule) -> Result<Self> {
        Self::try_from(rule)
    }

    /// `a_i = i`.
    pub fn linear() -> Self {
        Self::new(BlockRule::Linear { slope: 1.0 }).expect("valid rule")
    }

    pub fn seeded_psd(dim: usize, seed: u64) -> Result<Self> {
        Self::new(BlockRule::SeededPsd { dim, seed, floor: 0.1 })
    }

    pub fn rule(&self) -> &BlockRule {
        &self.rule
    }

    pub fn block_dim(&self, _n: usize) -> usize {
        match self.rule {
            BlockRule::Linear { .. } => 1,
            BlockRule::SeededPsd { dim, .. } => dim,
        }
    }

    /// The `n`-th block, `n ≥ 1`.
    pub fn block(&self, n: usize) -> CMatrix {
        assert!(n >= 1, "blocks are indexed from 1");
        if let Some(b) = self.cache.lock().expect("cache lock").get(&n) {
            return b.clone();
        }
        let b = match self.rule {
            BlockRule::Linear { slope } => CMatrix::scalar(1, slope * n as f64),
            BlockRule::SeededPsd { dim, seed, floor } => {
                let mut rng = substream(seed, &[0xD1A6, n as u64]);
                let mut spec: Vec<f64> = (0..dim).map(|_| rng.random_range(floor..=1.0)).collect();
                spec[0] = 1.0;
                with_spectrum(&mut rng, &spec).scale(n as f64)
            }
        };
        self.cache.lock().expect("cache lock").insert(n, b.clone());
        b
    }

    /// Largest index evaluated so far.
    pub fn cached_up_to(&self) -> usize {
        self.cache.lock().expect("cache lock").keys().next_back().copied().unwrap_or(0)
    }

    /// Whether the blocks `1..=horizon` are all positive definite.
    pub fn injective_up_to(&self, horizon: usize) -> Result<bool> {
        for n in 1..=horizon {
            let sd = positive_eig(&Operator::single(self.block(n))?)?;
            if sd.min_eigenvalue() <= sd.zero_cutoff() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The finite algebra over `support` (in ascending order) with `a` restricted to it.
    pub fn truncate(&self, support: &[usize]) -> Result<Operator> {
        if support.is_empty() {
            return Err(Error::InvalidParameter("empty support".into()));
        }
        Operator::from_blocks(support.iter().map(|&n| self.block(n)).collect())
    }
}

/// Finitely supported functional on the block algebra.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseFunctional {
    k: BTreeMap<usize, CMatrix>,
}

impl SparseFunctional {
    pub fn new(k: BTreeMap<usize, CMatrix>) -> Result<Self> {
        if k.contains_key(&0) {
            return Err(Error::InvalidParameter("blocks are indexed from 1".into()));
        }
        if k.values().any(|m| !m.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { k })
    }

    /// 1×1 blocks from `(index, value)` pairs.
    pub fn scalars(entries: &[(usize, f64)]) -> Result<Self> {
        Self::new(entries.iter().map(|&(n, v)| (n, CMatrix::scalar(1, v))).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn support(&self) -> Vec<usize> {
        self.k.keys().copied().collect()
    }

    pub fn k_at(&self, n: usize) -> Option<&CMatrix> {
        self.k.get(&n)
    }

    pub fn blocks(&self) -> &BTreeMap<usize, CMatrix> {
        &self.k
    }

    pub fn is_hermitian(&self) -> bool {
        self.k.values().all(|m| m.is_hermitian(crate::algebra::HERMITIAN_TOL * (1.0 + m.max_abs())))
    }

    pub fn is_positive(&self) -> bool {
        self.k
            .values()
            .all(|m| Functional::from_density(vec![m.clone()]).map(|f| is_positive(&f)).unwrap_or(false))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { k: self.k.iter().map(|(&n, m)| (n, m.scale(c))).collect() }
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let mut k = self.k.clone();
        for (&n, m) in &other.k {
            let add = m.scale(sign);
            k.entry(n).and_modify(|e| *e = &*e + &add).or_insert(add);
        }
        Self { k }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    fn check_dims(&self, a: &UnboundedBlockOperator) -> Result<()> {
        for (&n, m) in &self.k {
            if m.dim() != a.block_dim(n) {
                return Err(Error::InvalidStructure(format!(
                    "block {n} has side {} but a has side {}",
                    m.dim(),
                    a.block_dim(n)
                )));
            }
        }
        Ok(())
    }

    /// `φ(a) = Σ_n tr(k_n a_n)`.
    pub fn evaluate(&self, a: &UnboundedBlockOperator) -> Result<C64> {
        self.check_dims(a)?;
        Ok(self.k.iter().map(|(&n, k)| k.trace_product(&a.block(n))).sum())
    }

    /// `Σ_n tr(k_n x_n)` for a bounded block operator.
    pub fn evaluate_bounded(&self, x: &BoundedBlockOperator) -> C64 {
        self.k.iter().map(|(&n, k)| k.trace_product(&x.block(n, k.dim()))).sum()
    }

    /// Restriction to the finite algebra over `support`; indices outside the support of `self` get zero.
    pub fn on_support(&self, a: &UnboundedBlockOperator, support: &[usize]) -> Result<Functional> {
        self.check_dims(a)?;
        if let Some(n) = self.k.keys().find(|n| !support.contains(n)) {
            return Err(Error::InvalidParameter(format!("index {n} outside the truncation")));
        }
        Functional::from_density(
            support.iter().map(|&n| self.k.get(&n).cloned().unwrap_or_else(|| CMatrix::zeros(a.block_dim(n)))).collect(),
        )
    }

    /// Inverse of [`SparseFunctional::on_support`]; all-zero blocks are dropped.
    pub fn from_functional(support: &[usize], phi: &Functional) -> Result<Self> {
        if support.len() != phi.k_blocks().len() {
            return Err(Error::InvalidParameter("support length differs from block count".into()));
        }
        Self::new(
            support.iter().zip(phi.k_blocks()).filter(|(_, m)| m.max_abs() > 0.0).map(|(&n, m)| (n, m.clone())).collect(),
        )
    }
}

impl Serialize for SparseFunctional {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw: BTreeMap<usize, BlockJson> = self.k.iter().map(|(&n, m)| (n, BlockJson::from_matrix(m))).collect();
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparseFunctional {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        // keys arrive as strings when the map is buffered (untagged enums)
        let raw = BTreeMap::<String, BlockJson>::deserialize(d)?;
        let k = raw
            .into_iter()
            .map(|(n, b)| {
                let n: usize = n.parse().map_err(|_| Error::InvalidParameter(format!("block index `{n}`")))?;
                b.to_matrix().map(|m| (n, m))
            })
            .collect::<Result<BTreeMap<_, _>>>()
            .map_err(serde::de::Error::custom)?;
        SparseFunctional::new(k).map_err(serde::de::Error::custom)
    }
}

/// Bounded block operator: listed blocks, `default_scalar · 1` elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundedBlockOperator {
    pub blocks: BTreeMap<usize, CMatrix>,
    pub default_scalar: f64,
}

impl BoundedBlockOperator {
    pub fn identity() -> Self {
        Self { blocks: BTreeMap::new(), default_scalar: 1.0 }
    }

    pub fn zero() -> Self {
        Self { blocks: BTreeMap::new(), default_scalar: 0.0 }
    }

    pub fn block(&self, n: usize, dim: usize) -> CMatrix {
        self.blocks.get(&n).cloned().unwrap_or_else(|| CMatrix::scalar(dim, self.default_scalar))
    }
}

type TermFn = dyn Fn(usize) -> SparseFunctional + Send + Sync;
type TailFn = dyn Fn(usize) -> f64 + Send + Sync;

/// Normal weight `Φ = Σ_{i≥1} ω_i` with positive, finitely supported terms.
#[derive(Clone)]
pub struct WeightRep {
    term: Arc<TermFn>,
    tail: Arc<TailFn>,
    /// Number of nonzero terms, if finite.
    len: Option<usize>,
}

impl fmt::Debug for WeightRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightRep").field("len", &self.len).finish_non_exhaustive()
    }
}

impl WeightRep {
    /// `term(i)` for `i ≥ 1`; `tail(N)` must bound `Σ_{i>N} ω_i(a)` and decrease to 0.
    pub fn new(
        term: impl Fn(usize) -> SparseFunctional + Send + Sync + 'static,
        tail: impl Fn(usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { term: Arc::new(term), tail: Arc::new(tail), len: None }
    }

    /// `ω_i = i⁻³` on block `i`; against `a_i = i` the masses are `1/i²`.
    /// The tail `Σ_{i>N} 1/i²` is below `1/(N + ½)` by convexity of `1/x²`.
    pub fn basel() -> Self {
        Self::new(
            |i| SparseFunctional::scalars(&[(i, 1.0 / (i as f64).powi(3))]).expect("finite"),
            |n| if n == 0 { std::f64::consts::PI.powi(2) / 6.0 } else { 1.0 / (n as f64 + 0.5) },
        )
    }

    /// Finitely many terms; the tail is exact.
    pub fn finite(a: &UnboundedBlockOperator, terms: Vec<SparseFunctional>) -> Result<Self> {
        let mut masses = Vec::with_capacity(terms.len());
        for t in &terms {
            if !t.is_positive() {
                return Err(Error::InvalidParameter("weight terms must be positive".into()));
            }
            masses.push(t.evaluate(a)?.re);
        }
        let mut tails = vec![0.0; terms.len() + 1];
        for i in (0..terms.len()).rev() {
            tails[i] = tails[i + 1] + masses[i];
        }
        let len = terms.len();
        let terms = Arc::new(terms);
        Ok(Self {
            term: Arc::new(move |i| terms.get(i - 1).cloned().unwrap_or_default()),
            tail: Arc::new(move |n| tails.get(n).copied().unwrap_or(0.0)),
            len: Some(len),
        })
    }

    pub fn term(&self, i: usize) -> SparseFunctional {
        assert!(i >= 1, "terms are indexed from 1");
        (self.term)(i)
    }

    pub fn tail_bound(&self, n: usize) -> f64 {
        (self.tail)(n)
    }

    /// `Σ_{i≤n} ω_i`.
    pub fn partial_sum(&self, n: usize) -> SparseFunctional {
        (1..=n).fold(SparseFunctional::zero(), |acc, i| acc.add(&self.term(i)))
    }
}

/// `‖φ‖_a`, additive over blocks.
pub fn unbounded_a_norm(a: &UnboundedBlockOperator, phi: &SparseFunctional) -> Result<f64> {
    if !phi.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    phi.check_dims(a)?;
    let parts = phi
        .k
        .par_iter()
        .map(|(&n, k)| closed_a_norm(&Operator::single(a.block(n))?, &Functional::from_density(vec![k.clone()])?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(parts.iter().sum())
}

/// `‖φ‖_{a_λ}` with `a_λ = λa(λ+a)⁻¹`.
pub fn regularized_norm(a: &UnboundedBlockOperator, phi: &SparseFunctional, lambda: f64) -> Result<f64> {
    if !phi.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    phi.check_dims(a)?;
    let mut total = 0.0;
    for (&n, k) in &phi.k {
        let al = resolvent_cutoff(&Operator::single(a.block(n))?, lambda)?;
        total += closed_a_norm(&al, &Functional::from_density(vec![k.clone()])?)?;
    }
    Ok(total)
}

fn require_ascending(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|l| !(*l > 0.0 && l.is_finite())) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("λ grid must be positive and strictly ascending".into()));
    }
    Ok(())
}

/// `‖φ‖_{a_λ}` along an ascending grid; nondecreasing with limit `‖φ‖_a`.
pub fn regularized_norm_scan(a: &UnboundedBlockOperator, phi: &SparseFunctional, grid: &[f64]) -> Result<Vec<f64>> {
    require_ascending(grid)?;
    grid.par_iter().map(|&l| regularized_norm(a, phi, l)).collect()
}

/// Writes `(λ, value)` rows with a header.
pub fn write_scan_csv(w: impl Write, grid: &[f64], values: &[f64]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["lambda", "value"])?;
    for (l, v) in grid.iter().zip(values) {
        out.write_record([l.to_string(), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichCheck {
    /// `Σ tr(a_n^{1/2} k_n a_n^{1/2} x_n)`.
    pub direct: C64,
    /// `φ(a_λ^{1/2} x a_λ^{1/2})` along the grid.
    pub values: Vec<C64>,
    /// `|direct − value|` along the grid.
    pub residuals: Vec<f64>,
    /// Residual at the largest λ.
    pub residual: f64,
}

/// Compares `(a^{1/2}φa^{1/2})(x)` with `φ(a_λ^{1/2} x a_λ^{1/2})` for growing λ.
pub fn sandwich_limit_check(
    a: &UnboundedBlockOperator,
    phi: &SparseFunctional,
    x: &BoundedBlockOperator,
    grid: &[f64],
) -> Result<SandwichCheck> {
    require_ascending(grid)?;
    phi.check_dims(a)?;
    let eval = |root_of: &dyn Fn(&Operator) -> Result<Operator>| -> Result<C64> {
        let mut total = C64::new(0.0, 0.0);
        for (&n, k) in &phi.k {
            let r = root_of(&Operator::single(a.block(n))?)?;
            let r = r.block(0);
            total += k.trace_product(&(&(r * &x.block(n, k.dim())) * r));
        }
        Ok(total)
    };
    let direct = eval(&|b| Ok(positive_eig(b)?.map(f64::sqrt)))?;
    let values = grid
        .par_iter()
        .map(|&l| eval(&|b| Ok(positive_eig(b)?.map(|t| (l * t / (l + t)).sqrt()))))
        .collect::<Result<Vec<_>>>()?;
    let residuals: Vec<f64> = values.iter().map(|v| (direct - v).norm()).collect();
    let residual = residuals.last().copied().unwrap_or_else(|| direct.norm());
    Ok(SandwichCheck { direct, values, residuals, residual })
}

#[derive(Clone, Debug)]
pub struct Embedding {
    /// `φ_N = Σ_{i≤N} ω_i`.
    pub functional: SparseFunctional,
    pub n: usize,
    pub achieved_tail: f64,
    /// `φ_j(a)` for `j = 0..=N`.
    pub partial_values: Vec<f64>,
}

/// Smallest `N ≤ budget` with `tail_bound(N) ≤ ε`, and the partial sum up to it.
pub fn embed_weight(a: &UnboundedBlockOperator, weight: &WeightRep, epsilon: f64, budget: usize) -> Result<Embedding> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {epsilon}")));
    }
    let n = (0..=budget)
        .find(|&n| weight.tail_bound(n) <= epsilon)
        .ok_or(Error::TailBudgetExhausted { epsilon, budget })?;
    let mut functional = SparseFunctional::zero();
    let mut partial_values = vec![0.0];
    let mut acc = 0.0;
    for i in 1..=n {
        let t = weight.term(i);
        acc += t.evaluate(a)?.re;
        partial_values.push(acc);
        functional = functional.add(&t);
    }
    Ok(Embedding { functional, n, achieved_tail: weight.tail_bound(n), partial_values })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CauchyGap {
    /// `‖φ_M − φ_N‖_a`.
    pub norm: f64,
    /// `Σ_{N<i≤M} ω_i(a)`.
    pub tail_sum: f64,
}

/// Both sides of `‖φ_M − φ_N‖_a = Σ_{N<i≤M} ω_i(a)`.
pub fn cauchy_gap(a: &UnboundedBlockOperator, weight: &WeightRep, n: usize, m: usize) -> Result<CauchyGap> {
    if m < n {
        return Err(Error::InvalidParameter("need M ≥ N".into()));
    }
    let mut diff = SparseFunctional::zero();
    let mut tail_sum = 0.0;
    for i in n + 1..=m {
        let t = weight.term(i);
        tail_sum += t.evaluate(a)?.re;
        diff = diff.add(&t);
    }
    Ok(CauchyGap { norm: unbounded_a_norm(a, &diff)?, tail_sum })
}

#[derive(Clone, Debug)]
pub struct RegularDecomposition {
    /// Indices `n_1 < n_2 < …` of the selected subsequence.
    pub subsequence: Vec<usize>,
    /// Positive parts of the increments `ω_{n_1}, ω_{n_2} − ω_{n_1}, …`.
    pub plus_parts: Vec<SparseFunctional>,
    pub minus_parts: Vec<SparseFunctional>,
    pub plus_sum: SparseFunctional,
    pub minus_sum: SparseFunctional,
    /// `Σ (φ¹_k(a) + φ²_k(a) − ‖φ_k‖_a)`.
    pub cost_excess: f64,
    /// `modulus(n_K) + Σ slack(k)`, a bound on `‖ω − (plus_sum − minus_sum)‖_a`.
    pub error_bound: f64,
    /// Smallest eigenvalue over all blocks of both sums.
    pub min_eigenvalue: f64,
}

/// Slack `2^{-k}` for the `k`-th increment.
pub fn geometric_slack(k: usize) -> f64 {
    0.5f64.powi(k as i32)
}

/// Writes the limit of `seq` as a difference of two positive series.
///
/// `modulus(n)` is the claimed bound on `‖ω_m − ω_n‖_a` for `m > n` (indices from 1);
/// it is checked on every pair within the horizon `seq.len()`. The subsequence takes
/// the first index with `modulus ≤ 2^{-k}` for `k = 1, 2, …`, and each increment is
/// split by the certified decomposition with slack `slack(k)`.
pub fn regular_decomposition(
    a: &UnboundedBlockOperator,
    seq: &[SparseFunctional],
    modulus: impl Fn(usize) -> f64 + Sync,
    slack: impl Fn(usize) -> f64,
) -> Result<RegularDecomposition> {
    if seq.is_empty() {
        return Err(Error::InvalidParameter("empty sequence".into()));
    }
    let h = seq.len();
    let pairs: Vec<(usize, usize)> = (1..=h).flat_map(|n| (n + 1..=h).map(move |m| (n, m))).collect();
    let gaps = pairs
        .par_iter()
        .map(|&(n, m)| Ok((n, m, unbounded_a_norm(a, &seq[m - 1].sub(&seq[n - 1]))?)))
        .collect::<Result<Vec<_>>>()?;
    for (n, m, gap) in gaps {
        let bound = modulus(n);
        if gap > bound + 1e-12 * (1.0 + bound) {
            return Err(Error::NotSummable { n, m, gap, bound });
        }
    }

    let mut subsequence = Vec::new();
    let mut from = 1;
    for k in 1.. {
        match (from..=h).find(|&n| modulus(n) <= 0.5f64.powi(k)) {
            Some(n) => {
                subsequence.push(n);
                from = n + 1;
            }
            None => break,
        }
        if from > h {
            break;
        }
    }
    if subsequence.is_empty() {
        subsequence.push(h);
    }

    let mut support: BTreeSet<usize> = BTreeSet::new();
    for &n in &subsequence {
        support.extend(seq[n - 1].support());
    }
    let support: Vec<usize> = support.into_iter().collect();

    let mut plus_parts = Vec::new();
    let mut minus_parts = Vec::new();
    let mut cost_excess = 0.0;
    let mut slack_total = 0.0;
    let mut prev = SparseFunctional::zero();
    for (k, &n) in subsequence.iter().enumerate() {
        let incr = seq[n - 1].sub(&prev);
        prev = seq[n - 1].clone();
        let s = slack(k + 1);
        slack_total += s;
        if support.is_empty() {
            plus_parts.push(SparseFunctional::zero());
            minus_parts.push(SparseFunctional::zero());
            continue;
        }
        let at = a.truncate(&support)?;
        let cert = decomposition_infimum_with_slack(&at, &incr.on_support(a, &support)?, Some(s), 0, 0)?;
        cost_excess += cert.witness_cost(&at)? - cert.value;
        plus_parts.push(SparseFunctional::from_functional(&support, &cert.witness_plus)?);
        minus_parts.push(SparseFunctional::from_functional(&support, &cert.witness_minus)?);
    }

    let plus_sum = plus_parts.iter().fold(SparseFunctional::zero(), |acc, p| acc.add(p));
    let minus_sum = minus_parts.iter().fold(SparseFunctional::zero(), |acc, p| acc.add(p));
    let mut min_eigenvalue = f64::INFINITY;
    for m in plus_sum.k.values().chain(minus_sum.k.values()) {
        min_eigenvalue = min_eigenvalue.min(hermitian_eig(&Operator::single(m.clone())?)?.min_eigenvalue());
    }
    if min_eigenvalue == f64::INFINITY {
        min_eigenvalue = 0.0;
    }
    let last = *subsequence.last().expect("nonempty");
    Ok(RegularDecomposition {
        subsequence,
        plus_parts,
        minus_parts,
        plus_sum,
        minus_sum,
        cost_excess,
        error_bound: modulus(last) + slack_total,
        min_eigenvalue,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    Diagonal,
}

/// `{"model": "diagonal", "rule": {...}, "support": {"1": {"re": [[1]]}, ...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagonalInstance {
    pub model: ModelTag,
    pub rule: BlockRule,
    pub support: SparseFunctional,
}

impl DiagonalInstance {
    pub fn new(a: &UnboundedBlockOperator, phi: SparseFunctional) -> Self {
        Self { model: ModelTag::Diagonal, rule: a.rule.clone(), support: phi }
    }

    pub fn operator(&self) -> Result<UnboundedBlockOperator> {
        UnboundedBlockOperator::new(self.rule.clone())
    }
}

/// `Σ_n ‖k_n‖₁`.
pub fn sparse_trace_norm(phi: &SparseFunctional) -> Result<f64> {
    phi.k.values().map(trace_norm).sum()
}
