//! Probability that a uniform empirical process stays below a line, exactly
//! and by Monte Carlo, and the n P ~ const scaling at lambda = 1.
//!
//! cargo run --release --example ballot

use brwss::ballot::{ballot_exact, ballot_mc, smirnov_scaling_report, BallotQuery};

fn main() -> brwss::Result<()> {
    for (n, a, b_end) in [(5, 1.0, 1.0), (20, 2.0, 3.0), (50, 0.5, 4.0)] {
        let q = BallotQuery::new(n, a, b_end)?;
        let mc = ballot_mc(&q, 200_000, 1)?;
        println!(
            "n={n:<3} a={a} b={b_end}: exact {:.6}  mc {:.6} +- {:.6}",
            ballot_exact(&q)?,
            mc.estimate,
            mc.std_err
        );
    }
    for cell in smirnov_scaling_report(&[1.0, 2.0], &[10, 100, 1000], 100_000, 5)? {
        println!(
            "lambda={} n={:<5} (n / lambda^2) P = {:.3} +- {:.3}",
            cell.lambda,
            cell.n,
            cell.normalized,
            cell.std_err * cell.n as f64 / (cell.lambda * cell.lambda)
        );
    }
    Ok(())
}
