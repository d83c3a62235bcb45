//! Block structures, spectra, supports and compressions.

use l1a::algebra::{compress, hermitian_eig, is_central, op_sqrt, support_projection, BlockStructure, Operator};
use l1a::error::Result;
use l1a::matrix::CMatrix;

fn main() -> Result<()> {
    // M_2 ⊕ M_1 with a planted kernel vector in the first block
    let a = Operator::from_blocks(vec![
        CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]),
        CMatrix::from_real_rows(&[&[3.0]]),
    ])?;
    println!("dims {:?}", a.structure().dims());

    let sd = hermitian_eig(&a)?;
    for (b, spec) in sd.blocks.iter().enumerate() {
        println!("block {b}: eigenvalues {:?}", spec.values);
    }

    let q = support_projection(&a)?;
    println!("support projection:\n{:?}", q.block(0));

    let y = Operator::from_blocks(vec![
        CMatrix::from_real_rows(&[&[2.0, 0.5], &[0.5, -1.0]]),
        CMatrix::from_real_rows(&[&[4.0]]),
    ])?;
    let yq = compress(&y, &q)?;
    println!("compression to supp(a) has dims {:?}, norm {:.6}", yq.structure().dims(), yq.operator_norm()?);

    let root = op_sqrt(&a)?;
    println!("‖a^(1/2)·a^(1/2) − a‖∞ = {:.2e}", (&(&root * &root) - &a).max_abs());

    let s = BlockStructure::new(vec![2, 3, 1])?;
    let c = Operator::block_scalar(&s, &[0.5, 2.0, 1.25])?;
    println!("block scalar central: {}, a central: {}", is_central(&c), is_central(&a));
    Ok(())
}
