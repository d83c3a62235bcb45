//! Acceptance criteria 1–9, one pass/fail line each. Exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use l1a::algebra::Operator;
use l1a::anorm::closed_a_norm;
use l1a::center::{check_compression, check_subadd_abs, counterexample_search, reverify, CenterItem, CenterWitness, Violation};
use l1a::diagonal::{
    cauchy_gap, embed_weight, geometric_slack, regular_decomposition, regularized_norm_scan, SparseFunctional,
    UnboundedBlockOperator, WeightRep,
};
use l1a::functional::Functional;
use l1a::harness::{gen_instance, run_suite, Suite, SuiteConfig, SuiteReport};
use l1a::matrix::{c64, CMatrix};

struct Outcome {
    pass: bool,
    detail: String,
}

fn suite(suite: Suite, profile: &str, trials: usize, seed: u64) -> SuiteReport {
    let cfg = SuiteConfig::new(suite, trials, seed).with_profile(profile);
    run_suite(&cfg).unwrap_or_else(|e| panic!("{suite} on {profile}: {e}"))
}

fn tally(reports: &[&SuiteReport]) -> (usize, usize) {
    reports.iter().fold((0, 0), |(p, t), r| (p + r.passed, t + r.trials))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = suite(Suite::Oracle, "inj-rand8", 500, 42);
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: r.all_pass() && r.summary["max_gap"] <= 1e-8 * (1.0 + r.summary["max_closed"]),
        detail: format!(
            "{}/500 instances; max |cost − closed| {:.1e}; min audit margin over 100 decompositions each ≥ −1e-9 ({}); {secs:.1}s",
            r.passed,
            r.summary["max_gap"],
            if r.all_pass() { "held" } else { "broken" }
        ),
    }
}

fn criterion_2() -> Outcome {
    let non = suite(Suite::Faithfulness, "noninj-rand6", 200, 7);
    let inj = suite(Suite::Faithfulness, "inj-rand6", 200, 8);
    let (p, t) = tally(&[&non, &inj]);
    Outcome {
        pass: p == t,
        detail: format!(
            "{p}/{t}; kernel witness seminorm ≤ {:.1e}, |‖w‖₁ − 1| ≤ {:.1e}",
            non.summary["max_seminorm"],
            (non.summary["max_witness_norm"] - 1.0).abs()
        ),
    }
}

fn criterion_3() -> Outcome {
    let inj = suite(Suite::Duality, "inj-rand6", 500, 11);
    let non = suite(Suite::Duality, "noninj-rand6", 500, 12);
    let (p, t) = tally(&[&inj, &non]);
    Outcome {
        pass: p == t,
        detail: format!(
            "{p}/{t} triples; polar gap ≤ {:.1e}; ‖x‖^a vs ‖x‖ ≤ {:.1e}; vs ‖x_q‖ ≤ {:.1e}",
            inj.summary["max_polar_gap"].max(non.summary["max_polar_gap"]),
            inj.summary["max_dual_gap"],
            non.summary["max_dual_gap"]
        ),
    }
}

fn criterion_4() -> Outcome {
    let r = suite(Suite::Positivity, "inj-rand6", 400, 13);
    let min_mass = r
        .records
        .iter()
        .filter(|x| x.values["expected_positive"] == 0.0)
        .map(|x| x.values["negative_mass"])
        .fold(f64::INFINITY, f64::min);
    Outcome {
        pass: r.all_pass() && min_mass >= 1e-3,
        detail: format!("{}/400 agree; smallest negative-part mass {min_mass:.2e}", r.passed),
    }
}

fn criterion_5() -> Outcome {
    let c1 = suite(Suite::Center, "central-(2,3,1)", 5000, 21);
    let c2 = suite(Suite::Center, "central-rand4", 5000, 22);
    let (p, t) = tally(&[&c1, &c2]);

    let a = Operator::diag(&[1.0, 4.0]);
    let v = [c64(0.6, 0.0), c64(0.8, 0.0)];
    let e1 = Functional::from_density(vec![CMatrix::from_diag(&[1.0, 0.0])]).unwrap();
    let psi = Functional::from_density(vec![CMatrix::outer(&v).scale(-1.0)]).unwrap();
    let p_v = Operator::single(CMatrix::outer(&v)).unwrap();
    let vii = check_subadd_abs(&a, &e1, &psi).unwrap();
    let ii = check_compression(&a, &p_v, &e1).unwrap();

    // the same gaps from raw densities through a separate eigen-route
    let as_violation = |item, witness| Violation { item, gap: 0.0, normalized_gap: 0.0, witness };
    let vii_re =
        reverify(&a, &as_violation(CenterItem::SubaddAbs, CenterWitness::Pair { phi: e1.clone(), psi })).unwrap();
    let ii_re =
        reverify(&a, &as_violation(CenterItem::Compression, CenterWitness::Compression { p: p_v, phi: e1 })).unwrap();

    let search = counterexample_search(&a, 200, 5).unwrap();
    let best_vii = search.best_for(CenterItem::SubaddAbs).map_or(0.0, |v| v.gap);
    let best_ii = search.best_for(CenterItem::Compression).map_or(0.0, |v| v.gap);

    let fixtures_ok = (vii - 0.08).abs() <= 1e-10
        && (ii - 0.0512).abs() <= 1e-10
        && (vii_re - 0.08).abs() <= 1e-10
        && (ii_re - 0.0512).abs() <= 1e-10;
    Outcome {
        pass: p == t && fixtures_ok,
        detail: format!(
            "central: {} violations in {t} checks; (vii) gap {vii:.12} [{vii_re:.12}], (ii) gap {ii:.12} [{ii_re:.12}]; search best (vii) {best_vii:.4}, (ii) {best_ii:.4}",
            t - p
        ),
    }
}

fn criterion_6() -> Outcome {
    let a = UnboundedBlockOperator::linear();
    let phi = SparseFunctional::scalars(&[(1, 1.0), (2, -1.0), (3, 0.5)]).unwrap();
    let v = regularized_norm_scan(&a, &phi, &[1.0, 10.0, 100.0, 1e6]).unwrap();
    let want = [1.541667, 3.729604, 4.407194];
    let fixture = v.iter().zip(want).all(|(x, w)| (x - w).abs() <= 1e-6);
    let monotone = v.windows(2).all(|w| w[1] >= w[0]);
    let limit = (v[3] - 4.5).abs() <= 1e-4;
    let rand = suite(Suite::Convergence, "diag-psd3", 50, 31);
    Outcome {
        pass: fixture && monotone && limit && rand.all_pass(),
        detail: format!(
            "scan ({:.6}, {:.6}, {:.6}), λ=10⁶ → {:.7} (|Δ| {:.1e}); monotone {monotone}; random matrix-block scans {}/50",
            v[0],
            v[1],
            v[2],
            v[3],
            (v[3] - 4.5).abs(),
            rand.passed
        ),
    }
}

fn criterion_7() -> Outcome {
    let a = UnboundedBlockOperator::linear();
    let w = WeightRep::basel();
    let e = embed_weight(&a, &w, 0.01, 1_000_000).unwrap();
    let total = std::f64::consts::PI.powi(2) / 6.0;
    let increasing = e.partial_values.windows(2).all(|p| p[1] > p[0]);
    let reached = *e.partial_values.last().unwrap();
    let mut worst = 0.0_f64;
    for (n, m) in [(0, 1), (1, 10), (10, 100), (100, 1000), (37, 411), (500, 2000)] {
        let g = cauchy_gap(&a, &w, n, m).unwrap();
        worst = worst.max((g.norm - g.tail_sum).abs());
    }
    let tail100 = w.tail_bound(100);
    let r = suite(Suite::Embedding, "diag-linear", 50, 41);
    Outcome {
        pass: increasing && tail100 < 0.01 && total - reached <= tail100 && worst <= 1e-12 && r.all_pass(),
        detail: format!(
            "N = {}, φ_N(a) = {reached:.9} ↑ π²/6 = {total:.9}; tail_bound(100) = {tail100:.6}; Cauchy modulus error ≤ {worst:.1e}",
            e.n
        ),
    }
}

fn criterion_8() -> Outcome {
    let r = suite(Suite::Decomposition, "diag-linear", 100, 51);
    let a = UnboundedBlockOperator::linear();
    let phi = SparseFunctional::scalars(&[(1, 1.0), (2, -1.0)]).unwrap();
    let d = regular_decomposition(&a, &vec![phi; 20], |_| 0.0, geometric_slack).unwrap();
    let jordan = d.plus_sum == SparseFunctional::scalars(&[(1, 1.0)]).unwrap()
        && d.minus_sum == SparseFunctional::scalars(&[(2, 1.0)]).unwrap();
    Outcome {
        pass: r.all_pass() && jordan,
        detail: format!(
            "{}/100 sequences; min eigenvalue {:.1e}; max reconstruction error {:.1e} (bound 2^-18 = {:.1e}); constant fixture Jordan split {jordan}",
            r.passed,
            r.records.iter().map(|x| x.values["min_eigenvalue"]).fold(f64::INFINITY, f64::min),
            r.summary["max_reconstruction_error"],
            0.5f64.powi(18)
        ),
    }
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0_f64;
    for (i, profile) in ["inj-rand8", "noninj-rand8"].iter().enumerate() {
        let p = profile.parse().unwrap();
        for index in 0..100 {
            let inst = gen_instance(&p, 61 + i as u64, index).unwrap();
            let (a, phi) = inst.finite().unwrap();
            let closed = closed_a_norm(a, phi).unwrap();
            worst = worst.max((closed - common::sandwich_trace_norm(a, phi)).abs());
        }
    }
    let r = suite(Suite::TraceFormula, "inj-rand8", 200, 62);
    Outcome {
        pass: worst <= 1e-10 && r.all_pass(),
        detail: format!(
            "200 instances vs nalgebra: max |Δ| {worst:.1e}; vs realified Jacobi: {}/200, max |Δ| {:.1e}",
            r.passed, r.summary["max_difference"]
        ),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", criterion_1),
        ("norm iff injective", criterion_2),
        ("duality", criterion_3),
        ("positivity identity", criterion_4),
        ("center battery", criterion_5),
        ("regularization convergence", criterion_6),
        ("weight embedding", criterion_7),
        ("regular decomposition", criterion_8),
        ("semifinite trace formula", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {} {:<27} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {}/9 criteria pass", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
