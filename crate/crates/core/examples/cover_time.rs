//! Time until every vertex of the hypercube has been visited.
//!
//! cargo run --release --example cover_time

use brwss::hypercube::ModelParams;
use brwss::simulator::{run_ensemble, SimConfig};

fn main() -> brwss::Result<()> {
    for d in [4, 6, 8, 10] {
        let cfg = SimConfig::cover(ModelParams::from_rho(2, d, 1.5)?)?.with_replicas(200).with_seed(3);
        let stats = run_ensemble(&cfg)?;
        let median = stats.median().unwrap_or(f64::NAN);
        println!("d={d:<3} median cover time {median:.3}  median / d {:.3}", median / d as f64);
    }
    Ok(())
}
