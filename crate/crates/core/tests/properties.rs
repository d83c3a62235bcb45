mod common;

use proptest::prelude::*;

use l1a::algebra::{hermitian_eig, BlockStructure, Operator};
use l1a::anorm::{closed_a_norm, decomposition_infimum, dual_a_norm, is_injective, pairing, positivity_identity};
use l1a::center::{measure, sample_witness, CenterItem, VIOLATION_THRESHOLD};
use l1a::diagonal::{regularized_norm_scan, unbounded_a_norm, SparseFunctional, UnboundedBlockOperator};
use l1a::functional::{jordan_decompose, Functional};
use l1a::harness::resolvent_bound;
use l1a::sampling::{random_gram, random_hermitian, random_structure, substream, with_spectrum};

fn dims() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=5, 1..=3)
}

fn instance(seed: u64, dims: &[usize]) -> (Operator, Functional, Operator) {
    let s = BlockStructure::new(dims.to_vec()).unwrap();
    let mut rng = substream(seed, &[1]);
    let a = random_gram(&mut rng, &s);
    let phi = Functional::from_operator(&random_hermitian(&mut rng, &s));
    let x = random_hermitian(&mut rng, &s);
    (a, phi, x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_match_nalgebra(seed in any::<u64>(), n in 1usize..=8) {
        let s = BlockStructure::new(vec![n]).unwrap();
        let x = random_hermitian(&mut substream(seed, &[]), &s);
        let ours = &hermitian_eig(&x).unwrap().blocks[0].values;
        let theirs = common::eigenvalues(x.block(0));
        for (p, q) in ours.iter().zip(&theirs) {
            prop_assert!((p - q).abs() < 1e-11 * (1.0 + q.abs()));
        }
    }

    #[test]
    fn a_norm_is_a_seminorm(seed in any::<u64>(), dims in dims(), c in -3.0f64..3.0) {
        let (a, phi, _) = instance(seed, &dims);
        let psi = Functional::from_operator(&random_hermitian(&mut substream(seed, &[2]), a.structure()));
        let n = closed_a_norm(&a, &phi).unwrap();
        prop_assert!((closed_a_norm(&a, &phi.scale(c)).unwrap() - c.abs() * n).abs() < 1e-10 * (1.0 + n));
        let sum = closed_a_norm(&a, &(&phi + &psi)).unwrap();
        prop_assert!(sum <= n + closed_a_norm(&a, &psi).unwrap() + 1e-10);
        prop_assert!(n <= a.operator_norm().unwrap() * phi.norm().unwrap() + 1e-10);
    }

    #[test]
    fn certificate_witnesses_are_positive_and_tight(seed in any::<u64>(), dims in dims()) {
        let (a, phi, _) = instance(seed, &dims);
        let cert = decomposition_infimum(&a, &phi, 30, seed).unwrap();
        prop_assert!(cert.witness_plus.is_positive() && cert.witness_minus.is_positive());
        let cost = cert.witness_cost(&a).unwrap();
        prop_assert!((cost - cert.value).abs() <= 1e-8 * (1.0 + cert.value) + cert.slack);
        prop_assert!(cert.audit_floor.unwrap() >= cert.value - 1e-9);
    }

    #[test]
    fn jordan_parts_are_orthogonal(seed in any::<u64>(), dims in dims()) {
        let (_, phi, _) = instance(seed, &dims);
        let j = jordan_decompose(&phi).unwrap();
        prop_assert!(j.support_overlap() < 1e-10);
        prop_assert!((&j.reconstruct() - &phi).density().max_abs() < 1e-10);
        prop_assert!((j.abs().norm().unwrap() - phi.norm().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn pairing_is_bounded_by_norms(seed in any::<u64>(), dims in dims()) {
        let (a, phi, x) = instance(seed, &dims);
        let p = pairing(&a, &phi, &x).unwrap().norm();
        let d = dual_a_norm(&a, &x).unwrap();
        prop_assert!(p <= d * closed_a_norm(&a, &phi).unwrap() * (1.0 + 1e-12) + 1e-12);
        prop_assert!(d <= x.operator_norm().unwrap() + 1e-10);
        prop_assert!((d - common::compressed_norm(&a, &x)).abs() < 1e-10);
    }

    #[test]
    fn positive_functionals_satisfy_identity(seed in any::<u64>(), dims in dims()) {
        let s = BlockStructure::new(dims).unwrap();
        let mut rng = substream(seed, &[3]);
        let a = Operator::from_blocks(s.dims().iter().map(|&n| {
            let spec: Vec<f64> = (0..n).map(|i| 0.1 + i as f64).collect();
            with_spectrum(&mut rng, &spec)
        }).collect()).unwrap();
        prop_assume!(is_injective(&a).unwrap());
        let phi = Functional::from_operator(&random_gram(&mut rng, &s));
        let c = positivity_identity(&a, &phi).unwrap();
        prop_assert!(c.is_positive && c.identity_holds);
    }

    #[test]
    fn central_operators_pass_every_item(seed in any::<u64>(), item in 0usize..7) {
        let mut rng = substream(seed, &[4]);
        let s = random_structure(&mut rng, 4, 3);
        let values: Vec<f64> = (0..s.len()).map(|b| 0.5 + b as f64).collect();
        let a = Operator::block_scalar(&s, &values).unwrap();
        let item = CenterItem::ALL[item];
        let v = measure(&a, item, sample_witness(&mut rng, &s, item).unwrap()).unwrap();
        prop_assert!(v.normalized_gap <= VIOLATION_THRESHOLD, "{item}: {}", v.normalized_gap);
    }

    #[test]
    fn regularized_scan_is_monotone_and_bounded(
        entries in prop::collection::btree_map(1usize..40, -5.0f64..5.0, 1..6),
    ) {
        let a = UnboundedBlockOperator::linear();
        let pairs: Vec<(usize, f64)> = entries.into_iter().collect();
        let phi = SparseFunctional::scalars(&pairs).unwrap();
        let grid = [0.5, 3.0, 20.0, 400.0, 1e4];
        let v = regularized_norm_scan(&a, &phi, &grid).unwrap();
        let n = unbounded_a_norm(&a, &phi).unwrap();
        prop_assert!(v.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        for (l, x) in grid.iter().zip(&v) {
            prop_assert!(*x <= n + 1e-12);
            prop_assert!(n - x <= resolvent_bound(&a, &phi, *l).unwrap() + 1e-12);
        }
    }

    #[test]
    fn truncation_agrees_with_finite_norm(seed in any::<u64>()) {
        let a = UnboundedBlockOperator::seeded_psd(3, seed).unwrap();
        let mut rng = substream(seed, &[5]);
        let support = vec![1, 4, 9];
        let s = BlockStructure::new(vec![3, 3, 3]).unwrap();
        let phi = Functional::from_operator(&random_hermitian(&mut rng, &s));
        let sparse = SparseFunctional::from_functional(&support, &phi).unwrap();
        let finite = closed_a_norm(&a.truncate(&support).unwrap(), &phi).unwrap();
        prop_assert_eq!(unbounded_a_norm(&a, &sparse).unwrap(), finite);
    }
}
