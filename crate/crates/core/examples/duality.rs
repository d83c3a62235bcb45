//! Dual seminorm, pairing bound and the polar witness.

use l1a::algebra::Operator;
use l1a::anorm::{closed_a_norm, dual_a_norm, kernel_witness, pairing, polar_witness, positivity_identity};
use l1a::error::Result;
use l1a::functional::Functional;
use l1a::sampling::{random_gram, random_hermitian, substream};

fn main() -> Result<()> {
    let mut rng = substream(2024, &[]);
    let s = l1a::algebra::BlockStructure::new(vec![3, 2])?;
    let a = random_gram(&mut rng, &s);
    let phi = Functional::from_operator(&random_hermitian(&mut rng, &s));
    let x = random_hermitian(&mut rng, &s);

    let n = closed_a_norm(&a, &phi)?;
    let d = dual_a_norm(&a, &x)?;
    let p = pairing(&a, &phi, &x)?;
    println!("|⟨φ, x⟩_a| = {:.6} ≤ ‖x‖^a ‖φ‖_a = {:.6}", p.norm(), d * n);
    println!("injective a: ‖x‖^a = {d:.10}, ‖x‖ = {:.10}", x.operator_norm()?);

    let u = polar_witness(&a, &phi)?;
    println!("polar witness: ⟨φ, u⟩_a = {:.10}, ‖u‖^a = {:.10}", pairing(&a, &phi, &u)?.re, dual_a_norm(&a, &u)?);

    let a0 = Operator::diag(&[2.0, 0.0, 1.0]);
    let w = kernel_witness(&a0)?.expect("a0 has a kernel");
    println!("kernel witness: ‖w‖₁ = {:.1}, ‖w‖_a = {:.1e}", w.norm()?, closed_a_norm(&a0, &w)?);

    let pos = positivity_identity(&a, &Functional::from_operator(&random_gram(&mut rng, &s)))?;
    println!("positive φ: ‖φ‖_a = {:.10}, φ(a) = {:.10}", pos.a_norm, pos.value_at_a);
    Ok(())
}
