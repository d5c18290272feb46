//! Per-unit-d delay of the passage time when the mutation rate goes up.
//!
//! cargo run --release --example mutation_delay

use brwss::numerics::mutation_delay_coefficient;

fn main() -> brwss::Result<()> {
    let lambda1 = 0.6;
    for lambda2 in [0.8, 1.0, 1.5] {
        for factor in [1.1, 1.5, 2.0] {
            let c = mutation_delay_coefficient(2, lambda1, lambda2, lambda2 * factor)?;
            println!("lambda1={lambda1} lambda2={lambda2} lambda2'={:.2}: delay / d = {c:.5}", lambda2 * factor);
        }
    }
    Ok(())
}
