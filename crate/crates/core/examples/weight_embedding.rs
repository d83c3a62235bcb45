//! A normal weight Φ = Σ ω_i as a limit of finitely supported functionals.

use l1a::diagonal::{cauchy_gap, embed_weight, UnboundedBlockOperator, WeightRep};
use l1a::error::Result;

fn main() -> Result<()> {
    let a = UnboundedBlockOperator::linear();
    let w = WeightRep::basel();
    for eps in [0.1, 0.01, 0.001] {
        let e = embed_weight(&a, &w, eps, 1_000_000)?;
        println!("ε = {eps:<6} N = {:<5} φ_N(a) = {:.9}  tail ≤ {:.3e}", e.n, e.partial_values.last().unwrap(), e.achieved_tail);
    }
    println!("Φ(a) = π²/6 = {:.9}", std::f64::consts::PI.powi(2) / 6.0);

    let g = cauchy_gap(&a, &w, 100, 400)?;
    println!("‖φ_400 − φ_100‖_a = {:.15}, Σ ω_i(a) = {:.15}", g.norm, g.tail_sum);
    Ok(())
}
