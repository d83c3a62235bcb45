//! The a-norm two ways: closed form and a certified decomposition φ = φ₁ − φ₂.

use l1a::algebra::Operator;
use l1a::anorm::{closed_a_norm, decomposition_infimum};
use l1a::error::Result;
use l1a::functional::Functional;
use l1a::matrix::CMatrix;

fn main() -> Result<()> {
    let a = Operator::from_real_rows(&[&[2.0, 0.5], &[0.5, 1.0]])?;
    let phi = Functional::from_density(vec![CMatrix::from_real_rows(&[&[1.0, -0.7], &[-0.7, -0.4]])])?;

    let closed = closed_a_norm(&a, &phi)?;
    let cert = decomposition_infimum(&a, &phi, 300, 7)?;
    println!("closed form       {closed:.12}");
    println!("witness cost      {:.12}", cert.witness_cost(&a)?);
    println!("audit floor       {:.12} over {} decompositions", cert.audit_floor.unwrap(), cert.trials);
    println!("reconstruction    {:.1e}", cert.reconstruction_error(&phi));
    println!("φ₁ density:\n{:?}", cert.witness_plus.k_blocks()[0]);
    println!("φ₂ density:\n{:?}", cert.witness_minus.k_blocks()[0]);

    // a with a kernel: k couples supp(a) and ker(a), so the infimum is approached within the slack
    let a0 = Operator::diag(&[1.0, 0.0]);
    let phi0 = Functional::from_density(vec![CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])])?;
    let c0 = decomposition_infimum(&a0, &phi0, 100, 7)?;
    println!("\nnon-injective: value {:.3e}, cost {:.3e}, slack {:.1e}", c0.value, c0.witness_cost(&a0)?, c0.slack);

    println!("\n{}", serde_json::to_string_pretty(&cert)?);
    Ok(())
}
