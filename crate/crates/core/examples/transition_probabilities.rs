//! Distance-to-target transition probabilities, the expected number of
//! particles at the target, and the occupation time.
//!
//! cargo run --release --example transition_probabilities

use brwss::hypercube::{expected_occupation_time, expected_particles_log, transition_log_prob, ModelParams};

fn main() -> brwss::Result<()> {
    let p = ModelParams::from_rho(2, 20, 1.5)?;
    println!("b=2 d=20 rho=1.5");
    println!("{:>6} {:>4} {:>14} {:>14} {:>14}", "t", "m", "q_m(t)", "E N_0(t)", "occupation");
    for t in [0.5, 2.0, 10.0, 40.0] {
        for m in [0, 1, 5, 20] {
            println!(
                "{t:>6} {m:>4} {:>14.6e} {:>14.6e} {:>14.6e}",
                transition_log_prob(&p, m, t)?.exp(),
                expected_particles_log(&p, m, t)?.exp(),
                expected_occupation_time(&p, m, t)?,
            );
        }
    }
    Ok(())
}
