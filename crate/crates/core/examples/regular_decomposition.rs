//! Limit of an a-norm Cauchy sequence as a difference of two positive series.

use l1a::diagonal::{geometric_slack, regular_decomposition, unbounded_a_norm, SparseFunctional, UnboundedBlockOperator};
use l1a::error::Result;

fn main() -> Result<()> {
    let a = UnboundedBlockOperator::linear();
    let target = SparseFunctional::scalars(&[(1, 1.0), (2, -1.0), (4, 0.25)])?;
    let bump = SparseFunctional::scalars(&[(2, 0.5), (3, -0.5)])?;
    let bump = bump.scale(1.0 / unbounded_a_norm(&a, &bump)?);

    let horizon = 16;
    let seq: Vec<_> = (1..=horizon).map(|n| target.add(&bump.scale(0.5f64.powi(n)))).collect();
    let d = regular_decomposition(&a, &seq, |n| 1.5 * 0.5f64.powi(n as i32), geometric_slack)?;

    println!("subsequence {:?}", d.subsequence);
    println!("Σφ¹ = {:?}", d.plus_sum.blocks().iter().map(|(n, k)| (n, k[(0, 0)].re)).collect::<Vec<_>>());
    println!("Σφ² = {:?}", d.minus_sum.blocks().iter().map(|(n, k)| (n, k[(0, 0)].re)).collect::<Vec<_>>());
    let err = unbounded_a_norm(&a, &target.sub(&d.plus_sum.sub(&d.minus_sum)))?;
    println!("‖target − (Σφ¹ − Σφ²)‖_a = {err:.3e} ≤ bound {:.3e}", d.error_bound);
    println!("smallest eigenvalue of the positive sums: {:.3e}", d.min_eigenvalue);
    Ok(())
}
