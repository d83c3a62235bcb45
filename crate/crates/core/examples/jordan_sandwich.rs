//! Jordan decomposition of a Hermitian functional and the sandwich a^{1/2} φ a^{1/2}.

use l1a::algebra::Operator;
use l1a::error::Result;
use l1a::functional::{a_sandwich, jordan_decompose, Functional};
use l1a::matrix::{c64, CMatrix};

fn main() -> Result<()> {
    let k = CMatrix::from_vec(2, vec![c64(1.0, 0.0), c64(0.0, 2.0), c64(0.0, -2.0), c64(-1.0, 0.0)]);
    let phi = Functional::from_density(vec![k])?;
    let j = jordan_decompose(&phi)?;
    println!("‖φ‖₁ = {:.6}", phi.norm()?);
    println!("φ⁺(1) = {:.6}, φ⁻(1) = {:.6}", j.plus.norm()?, j.minus.norm()?);
    println!("support overlap ‖k⁺k⁻‖ = {:.1e}", j.support_overlap());
    println!("reconstruction error {:.1e}", (&j.reconstruct() - &phi).density().max_abs());

    let a = Operator::diag(&[1.0, 4.0]);
    let h = a_sandwich(&a, &phi)?;
    println!("a^(1/2) k a^(1/2) =\n{:?}", h.k_blocks()[0]);
    println!("‖a^(1/2) φ a^(1/2)‖₁ = {:.6}", h.norm()?);
    Ok(())
}
