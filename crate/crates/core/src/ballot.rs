//! Non-crossing probability of a linear boundary by the empirical process of
//! `n` uniforms:
//!
//! `q_n(a, b) = P(N_t - n t <= a + (b - a) t for all t in [0, 1])`,
//!
//! where `N_t` counts the uniforms in `[0, t]`.
//!
//! Between jumps `N_t - n t` decreases while the boundary does not, so the
//! supremum of their difference is attained at the jump points. At the `i`-th
//! order statistic the condition reads `i - n U_(i) <= a + (b - a) U_(i)`, i.e.
//! `U_(i) >= c_i` with `c_i = (i - a) / (n + b - a)`.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::{in_pool, replica_rng};

/// Largest `n` accepted by [`ballot_exact`].
pub const EXACT_MAX_N: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallotQuery {
    /// Number of uniforms.
    pub n: usize,
    /// Boundary at `t = 0`.
    pub a: f64,
    /// Boundary at `t = 1`.
    pub b_end: f64,
}

impl BallotQuery {
    pub fn new(n: usize, a: f64, b_end: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(b_end > 0.0 && b_end.is_finite()) {
            return Err(Error::domain(format!("boundary values must be positive and finite, got a = {a}, b_end = {b_end}")));
        }
        Ok(Self { n, a, b_end })
    }

    /// The flat boundary `lambda`, giving `P(sup_t (N_t - n t) <= lambda)`.
    pub fn flat(n: usize, lambda: f64) -> Result<Self> {
        Self::new(n, lambda, lambda)
    }

    /// Whether sorted samples stay below the boundary at every jump.
    pub fn survives(&self, sorted: &[f64]) -> bool {
        let n = sorted.len() as f64;
        sorted
            .iter()
            .enumerate()
            .all(|(i, &u)| (i + 1) as f64 - n * u <= self.a + (self.b_end - self.a) * u)
    }

    /// Lower bounds `c_i` on the order statistics, clamped at 0. `None` when
    /// the boundary can never be crossed.
    pub fn lower_bounds(&self) -> Option<Vec<f64>> {
        let denom = self.n as f64 + self.b_end - self.a;
        if denom <= 0.0 {
            // i - a < n + b_end - a <= 0 while the right side is >= denom
            return None;
        }
        Some((1..=self.n).map(|i| ((i as f64 - self.a) / denom).max(0.0)).collect())
    }
}

/// Exact `q_n(a, b_end)`, for `n <= EXACT_MAX_N`.
///
/// Conditions on the last index `l` with `#{U < c_l} >= l`. There the count
/// is exactly `l` and the remaining uniforms, rescaled to `[c_l, 1]`, face the
/// same problem with the shifted bounds. This gives an `O(n^2)` recursion over
/// suffixes whose terms are binomial probabilities, summed in log space.
pub fn ballot_exact(q: &BallotQuery) -> Result<f64> {
    let n = q.n;
    if n > EXACT_MAX_N {
        return Err(Error::Unsupported(format!("n = {n} exceeds {EXACT_MAX_N}; use ballot_mc")));
    }
    let Some(bounds) = q.lower_bounds() else {
        return Ok(1.0);
    };
    if bounds.last().is_some_and(|&c| c >= 1.0) {
        return Ok(0.0);
    }
    let mut c = Vec::with_capacity(n + 1);
    c.push(0.0);
    c.extend(bounds);
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, k| {
            *acc += (k as f64).ln();
            Some(*acc)
        }))
        .collect();

    // survive[j]: probability of no violation after j given exactly j uniforms below c_j
    let mut survive = vec![0.0; n + 1];
    survive[n] = 1.0;
    for j in (0..n).rev() {
        let rest = n - j;
        let ln_room = (1.0 - c[j]).ln();
        let mut crossed = 0.0;
        for l in j + 1..=n {
            let gap = c[l] - c[j];
            if gap <= 0.0 {
                continue;
            }
            let k = l - j;
            let ln_w = ln_fact[rest] - ln_fact[k] - ln_fact[rest - k] + k as f64 * (gap.ln() - ln_room)
                + (n - l) as f64 * ((1.0 - c[l]).ln() - ln_room);
            crossed += ln_w.exp() * survive[l];
        }
        survive[j] = (1.0 - crossed).clamp(0.0, 1.0);
    }
    Ok(survive[0])
}

/// Monte Carlo estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_err: f64,
    pub replicas: u64,
}

impl McEstimate {
    fn from_successes(successes: u64, replicas: u64) -> Self {
        let p = successes as f64 / replicas as f64;
        Self { estimate: p, std_err: (p * (1.0 - p) / replicas as f64).sqrt(), replicas }
    }
}

/// Fills `out` with `n` sorted uniforms from normalized exponential spacings.
fn sorted_uniforms<R: Rng + ?Sized>(rng: &mut R, n: usize, out: &mut Vec<f64>) {
    out.clear();
    let mut sum = 0.0;
    for _ in 0..n {
        sum += rng.sample::<f64, _>(Exp1);
        out.push(sum);
    }
    let total = sum + rng.sample::<f64, _>(Exp1);
    out.iter_mut().for_each(|s| *s /= total);
}

/// Monte Carlo `q_n(a, b_end)`. Replica `i` uses the simulator's stream
/// `replica_rng(master_seed, i)`, so the result does not depend on threads.
pub fn ballot_mc(q: &BallotQuery, replicas: u64, master_seed: u64) -> Result<McEstimate> {
    if replicas == 0 {
        return Err(Error::domain("ballot_mc needs at least one replica"));
    }
    let successes = in_pool(|| {
        (0..replicas)
            .into_par_iter()
            .map_init(Vec::new, |buf, i| {
                sorted_uniforms(&mut replica_rng(master_seed, i), q.n, buf);
                u64::from(q.survives(buf))
            })
            .sum::<u64>()
    })?;
    Ok(McEstimate::from_successes(successes, replicas))
}

/// One cell of the Smirnov scaling table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmirnovCell {
    pub lambda: f64,
    pub n: usize,
    /// Monte Carlo `P(sup_t (N_t - n t) < lambda)`.
    pub p_hat: f64,
    pub std_err: f64,
    /// `(n / lambda^2) p_hat`.
    pub normalized: f64,
    /// Exact value when `n <= EXACT_MAX_N`.
    pub exact: Option<f64>,
}

/// One Smirnov cell; the exact value is included when `n <= exact_max_n`
/// (at most [`EXACT_MAX_N`]).
pub fn smirnov_cell(lambda: f64, n: usize, replicas: u64, master_seed: u64, exact_max_n: usize) -> Result<SmirnovCell> {
    if !(lambda >= 1.0 && lambda * lambda <= n as f64) {
        return Err(Error::domain(format!("need 1 <= lambda <= sqrt(n), got lambda = {lambda}, n = {n}")));
    }
    let q = BallotQuery::flat(n, lambda)?;
    let mc = ballot_mc(&q, replicas, master_seed)?;
    let exact = if n <= exact_max_n.min(EXACT_MAX_N) { Some(ballot_exact(&q)?) } else { None };
    Ok(SmirnovCell {
        lambda,
        n,
        p_hat: mc.estimate,
        std_err: mc.std_err,
        normalized: n as f64 / (lambda * lambda) * mc.estimate,
        exact,
    })
}

/// Seed of grid cell `index`, spaced far apart in the replica index space.
pub fn cell_seed(master_seed: u64, index: usize) -> u64 {
    master_seed.wrapping_add((index as u64) << 40)
}

/// Estimates `(n / lambda^2) P(sup_t (N_t - n t) < lambda)` on a grid with
/// `1 <= lambda <= sqrt(n)`, row-major in `lambda`.
pub fn smirnov_scaling_report(
    lambda_grid: &[f64],
    n_grid: &[usize],
    replicas: u64,
    master_seed: u64,
) -> Result<Vec<SmirnovCell>> {
    for &lambda in lambda_grid {
        for &n in n_grid {
            if !(lambda >= 1.0 && lambda * lambda <= n as f64) {
                return Err(Error::domain(format!("need 1 <= lambda <= sqrt(n), got lambda = {lambda}, n = {n}")));
            }
        }
    }
    let mut cells = Vec::with_capacity(lambda_grid.len() * n_grid.len());
    for (li, &lambda) in lambda_grid.iter().enumerate() {
        for (ni, &n) in n_grid.iter().enumerate() {
            let seed = cell_seed(master_seed, li * n_grid.len() + ni);
            cells.push(smirnov_cell(lambda, n, replicas, seed, EXACT_MAX_N)?);
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Birnbaum-Tingey: `P(sup_t (F_n(t) - t) <= eps)`.
    fn birnbaum_tingey(n: usize, eps: f64) -> f64 {
        let nf = n as f64;
        let top = (nf * (1.0 - eps)).floor() as usize;
        let mut ln_binom = 0.0;
        let mut sum = 0.0;
        for j in 0..=top {
            if j > 0 {
                ln_binom += ((n - j + 1) as f64).ln() - (j as f64).ln();
            }
            let jf = j as f64;
            let lo = 1.0 - eps - jf / nf;
            let term = if lo <= 0.0 {
                0.0
            } else {
                (ln_binom + (nf - jf) * lo.ln() + (jf - 1.0) * (eps + jf / nf).ln()).exp()
            };
            sum += term;
        }
        1.0 - eps * sum
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(ballot_exact(&BallotQuery::new(0, 1.0, 1.0).unwrap()).unwrap(), 1.0);
        assert_eq!(ballot_exact(&BallotQuery::new(1, 1.0, 1.0).unwrap()).unwrap(), 1.0);
        // n + b_end - a <= 0: never crossed
        assert_eq!(ballot_exact(&BallotQuery::new(3, 10.0, 1.0).unwrap()).unwrap(), 1.0);
        assert!(BallotQuery::new(3, -1.0, 1.0).is_err());
        assert!(BallotQuery::new(3, 1.0, 0.0).is_err());
        assert!(ballot_exact(&BallotQuery::new(EXACT_MAX_N + 1, 1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn two_samples_flat_unit_boundary() {
        let q = ballot_exact(&BallotQuery::flat(2, 1.0).unwrap()).unwrap();
        assert!((q - 0.75).abs() < 1e-14, "{q}");
    }

    #[test]
    fn flat_boundary_matches_birnbaum_tingey() {
        for n in [3usize, 10, 50, 200, 1000] {
            for lambda in [1.0, 1.5, 3.0] {
                let exact = ballot_exact(&BallotQuery::flat(n, lambda).unwrap()).unwrap();
                let oracle = birnbaum_tingey(n, lambda / n as f64);
                assert!((exact - oracle).abs() <= 1e-9 * oracle.max(1e-3), "n={n} lambda={lambda}: {exact} vs {oracle}");
            }
        }
    }

    #[test]
    fn survives_agrees_with_lower_bounds() {
        let q = BallotQuery::new(5, 1.3, 2.2).unwrap();
        let c = q.lower_bounds().unwrap();
        let mut rng = replica_rng(1, 2);
        let mut buf = Vec::new();
        for _ in 0..2000 {
            sorted_uniforms(&mut rng, 5, &mut buf);
            assert_eq!(q.survives(&buf), buf.iter().zip(&c).all(|(u, c)| u >= c));
        }
    }

    #[test]
    fn mc_matches_exact_small_n() {
        for (n, a, b) in [(5usize, 1.0, 1.0), (10, 1.0, 2.5), (8, 2.0, 0.5)] {
            let q = BallotQuery::new(n, a, b).unwrap();
            let exact = ballot_exact(&q).unwrap();
            let mc = ballot_mc(&q, 200_000, 17).unwrap();
            assert!((mc.estimate - exact).abs() <= 4.0 * mc.std_err, "{n} {a} {b}: {} vs {exact}", mc.estimate);
        }
    }

    #[test]
    fn smirnov_grid_rejects_large_lambda() {
        assert!(smirnov_scaling_report(&[5.0], &[10], 10, 0).is_err());
        let cells = smirnov_scaling_report(&[1.0], &[1], 10, 0).unwrap();
        assert_eq!(cells[0].p_hat, 1.0);
    }
}
