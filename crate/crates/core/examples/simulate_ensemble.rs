//! Reproducible ensemble of first-passage times with the projected engine.
//!
//! cargo run --release --example simulate_ensemble

use brwss::hypercube::ModelParams;
use brwss::numerics::solve_first_moment;
use brwss::simulator::{run_ensemble, SimConfig};

fn main() -> brwss::Result<()> {
    for d in [16, 20, 24] {
        let p = ModelParams::from_rho(2, d, 1.5)?;
        let cfg = SimConfig::new(p, 1)?.with_replicas(500).with_seed(7);
        let stats = run_ensemble(&cfg)?;
        let q = stats.quantiles.expect("replicas > 0");
        println!(
            "d={d}: t_root={:.3} median={:.3} q10={:.3} q90={:.3} censored={}",
            solve_first_moment(&p, 1)?,
            q.median,
            q.q10,
            q.q90,
            stats.censored_count
        );
    }
    Ok(())
}
