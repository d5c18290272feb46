//! Fast regime (rho > e): Lambert-W centering and the barrier time.
//!
//! cargo run --release --example predict_fast

use brwss::hypercube::ModelParams;
use brwss::numerics::{bar_t, predict_fast, SolverConfig};

fn main() -> brwss::Result<()> {
    let rho = 5.0;
    for d in [64, 128, 1_000, 1_000_000] {
        let p = ModelParams::from_rho(2, d, rho)?;
        for m in [1, 2, 5] {
            let pred = predict_fast(&p, m, &SolverConfig::default())?;
            println!(
                "d={d:<8} m={m}  lambert={:>9.4}  root={:>9.4}  bar_t={:>9.4}",
                pred.t_predicted,
                pred.t_first_moment.unwrap_or(f64::NAN),
                bar_t(&p, m)?
            );
        }
    }
    Ok(())
}
