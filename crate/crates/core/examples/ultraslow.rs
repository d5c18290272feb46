//! Ultra-slow regime: rho(d) -> 1 along a schedule for log rho.
//!
//! cargo run --release --example ultraslow

use brwss::numerics::{predict_ultraslow, LogRhoInverseLog, LogRhoPower, SolverConfig};

fn main() -> brwss::Result<()> {
    let cfg = SolverConfig::default();
    let power = LogRhoPower { coefficient: 1.0, exponent: -0.5 };
    let inverse_log = LogRhoInverseLog { coefficient: 1.0 };
    for d in [1_000usize, 10_000, 100_000, 1_000_000] {
        let a = predict_ultraslow(&power, d, 1, &cfg)?;
        let b = predict_ultraslow(&inverse_log, d, 1, &cfg)?;
        println!(
            "d={d:<8} log rho = d^-1/2: t={:>14.3} correction={:>8.3}   log rho = 1/log d: t={:>12.3} correction={:>8.3}",
            a.t_predicted,
            a.term("correction").unwrap_or(0.0),
            b.t_predicted,
            b.term("correction").unwrap_or(0.0),
        );
    }
    Ok(())
}
