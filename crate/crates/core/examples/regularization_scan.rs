//! ‖φ‖_{a_λ} increases to ‖φ‖_a for a_i = i.

use l1a::diagonal::{regularized_norm_scan, sandwich_limit_check, unbounded_a_norm, write_scan_csv, BoundedBlockOperator, SparseFunctional, UnboundedBlockOperator};
use l1a::error::Result;

fn main() -> Result<()> {
    let a = UnboundedBlockOperator::linear();
    let phi = SparseFunctional::scalars(&[(1, 1.0), (2, -1.0), (3, 0.5)])?;
    let grid = [1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6];

    let values = regularized_norm_scan(&a, &phi, &grid)?;
    println!("‖φ‖_a = {}", unbounded_a_norm(&a, &phi)?);
    write_scan_csv(std::io::stdout(), &grid, &values)?;

    let x = BoundedBlockOperator::identity();
    let c = sandwich_limit_check(&a, &SparseFunctional::scalars(&[(1, 1.0), (2, 1.0)])?, &x, &grid)?;
    println!("\n(a^(1/2) φ a^(1/2))(1) = {}", c.direct.re);
    for (l, r) in grid.iter().zip(&c.residuals) {
        println!("λ = {l:>8}: residual {r:.3e}");
    }
    Ok(())
}
