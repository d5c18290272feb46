//! Slow regime (1 < rho < e): first-moment root against x0 d + r m.
//!
//! cargo run --release --example predict_slow

use brwss::hypercube::ModelParams;
use brwss::numerics::{predict_slow, regime_constants, SolverConfig};

fn main() -> brwss::Result<()> {
    let (b, d, rho) = (4, 10_000, 2.0);
    let p = ModelParams::from_rho(b, d, rho)?;
    let c = regime_constants(b, rho)?;
    println!("b={b} d={d} rho={rho}: x0={:.6} r={:.6}", c.x0, c.r);
    println!("{:>5} {:>12} {:>12} {:>8}", "m", "t_root", "x0 d + r m", "gap");
    for m in [1, 10, 50, 100, 200, 500] {
        let pred = predict_slow(&p, m, &SolverConfig::default())?;
        let root = pred.t_first_moment.unwrap_or(f64::NAN);
        println!("{m:>5} {root:>12.4} {:>12.4} {:>8.4}", pred.t_predicted, root - pred.t_predicted);
    }
    Ok(())
}
