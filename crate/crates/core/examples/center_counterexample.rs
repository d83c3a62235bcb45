//! Center battery: central a passes every item, a = diag(1, 4) does not.

use l1a::algebra::{BlockStructure, Operator};
use l1a::center::{check_compression, check_subadd_abs, counterexample_search, reverify, run_battery, CenterItem};
use l1a::error::Result;
use l1a::functional::Functional;
use l1a::matrix::{c64, CMatrix};

fn main() -> Result<()> {
    let s = BlockStructure::new(vec![2, 3, 1])?;
    let central = Operator::block_scalar(&s, &[0.5, 2.0, 1.25])?;
    for r in run_battery(&central, &CenterItem::ALL, 500, 1)? {
        println!("{:<18} {} samples, {} violations, max normalized gap {:+.2e}", r.item.to_string(), r.samples, r.violations.len(), r.max_normalized_gap);
    }

    let a = Operator::diag(&[1.0, 4.0]);
    let v = [c64(0.6, 0.0), c64(0.8, 0.0)];
    let e1 = Functional::from_density(vec![CMatrix::from_diag(&[1.0, 0.0])])?;
    let psi = Functional::from_density(vec![CMatrix::outer(&v).scale(-1.0)])?;
    println!("\nsubadditivity of |·| gap: {:.6}", check_subadd_abs(&a, &e1, &psi)?);
    let p = Operator::single(CMatrix::outer(&v))?;
    println!("compression gap:          {:.6}", check_compression(&a, &p, &e1)?);

    let out = counterexample_search(&a, 400, 3)?;
    println!("\nsearch found {} violated items", out.violations.len());
    for v in &out.violations {
        println!("  {:<18} gap {:.6} (reverified {:.6})", v.item.to_string(), v.gap, reverify(&a, v)?);
    }
    Ok(())
}
