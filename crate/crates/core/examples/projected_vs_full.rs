//! The projected (distance-only) engine and the full-genotype engine sample
//! the same passage-time law.
//!
//! cargo run --release --example projected_vs_full

use brwss::hypercube::ModelParams;
use brwss::simulator::{run_ensemble, SimConfig, SimMode};

fn main() -> brwss::Result<()> {
    let p = ModelParams::from_rho(3, 6, 1.5)?;
    for (mode, seed) in [(SimMode::Projected, 1), (SimMode::FullGenotype, 2)] {
        let cfg = SimConfig::new(p, 3)?.with_mode(mode).with_replicas(5000).with_seed(seed);
        let q = run_ensemble(&cfg)?.quantiles.expect("replicas > 0");
        println!("{mode:?}: q10={:.3} q25={:.3} median={:.3} q75={:.3} q90={:.3}", q.q10, q.q25, q.median, q.q75, q.q90);
    }
    Ok(())
}
