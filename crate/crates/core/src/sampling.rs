//! Seeded random instances.
//!
//! Streams are ChaCha8 generators keyed by SHA-256 of `(seed, path…)`, so every
//! trial (and every sub-trial inside it) owns an independent stream that does
//! not depend on scheduling order.
//!
//! * Hermitian: complex Gaussian `G`, then `(G + G*)/2`.
//! * PSD: Gram matrix `G G*`.
//! * Unitary: eigenvectors of a sampled Hermitian.
//! * Projection: span of a random subset of those eigenvectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use crate::algebra::{BlockStructure, Operator};
use crate::eig::{jacobi_hermitian, spectral_map};
use crate::matrix::{vec_norm, C64, CMatrix};

pub type Stream = ChaCha8Rng;

/// Independent stream for `(seed, path)`.
pub fn substream(seed: u64, path: &[u64]) -> Stream {
    let mut h = Sha256::new();
    h.update(b"l1a-stream");
    h.update(seed.to_le_bytes());
    for p in path {
        h.update(p.to_le_bytes());
    }
    let key: [u8; 32] = h.finalize().into();
    ChaCha8Rng::from_seed(key)
}

pub fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rng: &mut impl Rng, n: usize) -> CMatrix {
    CMatrix::from_vec(n, (0..n * n).map(|_| complex_gaussian(rng)).collect())
}

/// Uniform point on the unit sphere of `ℂⁿ`.
pub fn unit_vector(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

pub fn hermitian_block(rng: &mut impl Rng, n: usize) -> CMatrix {
    gaussian_matrix(rng, n).hermitian_part()
}

pub fn gram_block(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = gaussian_matrix(rng, n);
    (&g * &g.adjoint()).hermitian_part()
}

pub fn unitary_block(rng: &mut impl Rng, n: usize) -> CMatrix {
    let h = hermitian_block(rng, n);
    jacobi_hermitian(&h).expect("Gaussian Hermitian blocks are finite").1
}

/// `U diag(values) U*` with a random unitary `U`.
pub fn with_spectrum(rng: &mut impl Rng, values: &[f64]) -> CMatrix {
    let u = unitary_block(rng, values.len());
    spectral_map(values, &u, |x| x).hermitian_part()
}

/// Projection of the given rank in `M_n`.
pub fn projection_block(rng: &mut impl Rng, n: usize, rank: usize) -> CMatrix {
    let mut d = vec![0.0; n];
    d.iter_mut().take(rank).for_each(|x| *x = 1.0);
    with_spectrum(rng, &d)
}

pub fn random_hermitian(rng: &mut impl Rng, s: &BlockStructure) -> Operator {
    Operator::from_blocks(s.dims().iter().map(|&n| hermitian_block(rng, n)).collect()).expect("finite blocks")
}

pub fn random_gram(rng: &mut impl Rng, s: &BlockStructure) -> Operator {
    Operator::from_blocks(s.dims().iter().map(|&n| gram_block(rng, n)).collect()).expect("finite blocks")
}

/// Random projection; each block gets a uniformly drawn rank in `0..=n`.
pub fn random_projection(rng: &mut impl Rng, s: &BlockStructure) -> Operator {
    let blocks = s
        .dims()
        .iter()
        .map(|&n| {
            let rank = rng.random_range(0..=n);
            projection_block(rng, n, rank)
        })
        .collect();
    Operator::from_blocks(blocks).expect("finite blocks")
}

/// Random unit vector per block (not jointly normalized).
pub fn block_unit_vectors(rng: &mut impl Rng, s: &BlockStructure) -> Vec<Vec<C64>> {
    s.dims().iter().map(|&n| unit_vector(rng, n)).collect()
}

/// Random structure with `1..=max_blocks` blocks of side `1..=max_dim`.
pub fn random_structure(rng: &mut impl Rng, max_dim: usize, max_blocks: usize) -> BlockStructure {
    let k = rng.random_range(1..=max_blocks.max(1));
    BlockStructure::new((0..k).map(|_| rng.random_range(1..=max_dim.max(1))).collect()).expect("dims ≥ 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::is_projection;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| substream(42, &[0]).random()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let x: u64 = substream(42, &[0]).random();
        let y: u64 = substream(42, &[1]).random();
        let z: u64 = substream(43, &[0]).random();
        assert!(x != y && x != z);
    }

    #[test]
    fn samples_have_their_shapes() {
        let mut rng = substream(7, &[]);
        let s = BlockStructure::new(vec![3, 1, 2]).unwrap();
        assert!(random_hermitian(&mut rng, &s).is_hermitian());
        let p = random_projection(&mut rng, &s);
        assert!(is_projection(&p));
        let u = unitary_block(&mut rng, 4);
        assert!((&(&u.adjoint() * &u) - &CMatrix::identity(4)).max_abs() < 1e-12);
        let v = unit_vector(&mut rng, 5);
        assert!((vec_norm(&v) - 1.0).abs() < 1e-14);
    }
}
