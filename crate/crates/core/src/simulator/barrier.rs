use crate::error::{Error, Result};

/// Whether the counting process of `mutation_times` stays below the line
/// `N_s <= s m / t + 1` on `[0, t]`.
///
/// Between jumps the count is constant and the line increases, so checking
/// at each jump (with ties counted together) is exact.
pub fn survived_barrier(mutation_times: &[f64], m: usize, t: f64) -> Result<bool> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("barrier horizon t = {t} must be > 0")));
    }
    if mutation_times.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::domain("mutation times must be sorted"));
    }
    if mutation_times.iter().any(|&s| !(0.0..=t).contains(&s)) {
        return Err(Error::domain(format!("mutation times must lie in [0, {t}]")));
    }
    let slope = m as f64 / t;
    Ok(mutation_times
        .iter()
        .enumerate()
        .all(|(i, &s)| (i + 1) as f64 <= s * slope + 1.0))
}
