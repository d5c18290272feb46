//! Exact primitives of the b-ary hypercube `{0, .., b-1}^d`.
//!
//! Everything that can underflow at large `d` (transition probabilities,
//! expected particle counts) is returned as a [`LogProb`]. Exact counts use
//! arbitrary precision integers; see [`counting`].

pub mod counting;
mod quadrature;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use counting::{
    binomial, count_at_distance_pair, count_triples, log_binomial, log_sphere_size, sphere_size,
};

/// Model parameters of the branching random walk.
///
/// `lambda1` is the per-particle branching rate and `lambda2` the per-particle
/// mutation rate, both in events per unit time. The growth parameter is
/// `rho = exp(lambda1 / lambda2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub b: u32,
    pub d: usize,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl ModelParams {
    pub fn new(b: u32, d: usize, lambda1: f64, lambda2: f64) -> Result<Self> {
        if b < 2 {
            return Err(Error::domain(format!("alphabet size b = {b} must be >= 2")));
        }
        if b > 256 {
            return Err(Error::domain(format!("alphabet size b = {b} must be <= 256")));
        }
        if d < 1 {
            return Err(Error::domain("genome length d must be >= 1"));
        }
        if !(lambda1 > 0.0 && lambda1.is_finite()) {
            return Err(Error::domain(format!("lambda1 = {lambda1} must be finite and > 0")));
        }
        if !(lambda2 > 0.0 && lambda2.is_finite()) {
            return Err(Error::domain(format!("lambda2 = {lambda2} must be finite and > 0")));
        }
        Ok(Self { b, d, lambda1, lambda2 })
    }

    /// Parameters with unit mutation rate and `lambda1 = log(rho)`.
    pub fn from_rho(b: u32, d: usize, rho: f64) -> Result<Self> {
        if !(rho > 1.0 && rho.is_finite()) {
            return Err(Error::domain(format!("rho = {rho} must be finite and > 1")));
        }
        Self::new(b, d, rho.ln(), 1.0)
    }

    pub fn rho(&self) -> f64 {
        self.log_rho().exp()
    }

    /// `log(rho) = lambda1 / lambda2`, the branching rate in rescaled time.
    pub fn log_rho(&self) -> f64 {
        self.lambda1 / self.lambda2
    }

    /// Equivalent parameters with `lambda2 = 1`. Times of the rescaled model
    /// equal original times multiplied by `lambda2`.
    pub fn rescaled(&self) -> Self {
        Self {
            lambda1: self.log_rho(),
            lambda2: 1.0,
            ..*self
        }
    }

    /// Converts a rescaled time to the original time units.
    pub fn to_raw_time(&self, t: f64) -> f64 {
        t / self.lambda2
    }

    /// Converts an original time to rescaled units.
    pub fn to_rescaled_time(&self, t: f64) -> f64 {
        t * self.lambda2
    }

    /// `b / ((b - 1) d)`, the decay rate of the single-coordinate correlation.
    pub(crate) fn mixing_rate(&self) -> f64 {
        let b = f64::from(self.b);
        b / ((b - 1.0) * self.d as f64)
    }

    /// `b^d` if it fits in a `u64`.
    pub fn vertex_count(&self) -> Option<u64> {
        u64::from(self.b).checked_pow(u32::try_from(self.d).ok()?)
    }
}

/// A vertex of the hypercube: `d` symbols in `[0, b)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Genotype {
    symbols: Vec<u8>,
}

impl Genotype {
    pub fn new(symbols: Vec<u8>, b: u32) -> Result<Self> {
        if let Some((i, &s)) = symbols.iter().enumerate().find(|(_, &s)| u32::from(s) >= b) {
            return Err(Error::domain(format!("symbol {s} at position {i} is not in [0, {b})")));
        }
        Ok(Self { symbols })
    }

    /// The all-zero genotype.
    pub fn origin(d: usize) -> Self {
        Self { symbols: vec![0; d] }
    }

    /// Genotype at distance `m` from the origin: the first `m` symbols are 1.
    pub fn at_distance(d: usize, m: usize) -> Result<Self> {
        if m > d {
            return Err(Error::domain(format!("distance m = {m} exceeds d = {d}")));
        }
        let mut symbols = vec![0; d];
        symbols[..m].fill(1);
        Ok(Self { symbols })
    }

    /// Decodes a base-`b` index (coordinate 0 is the least significant digit).
    pub fn from_index(mut index: u64, d: usize, b: u32) -> Self {
        let b = u64::from(b);
        let symbols = (0..d)
            .map(|_| {
                let s = (index % b) as u8;
                index /= b;
                s
            })
            .collect();
        Self { symbols }
    }

    /// Base-`b` index; `None` if `b^d` overflows a `u64`.
    pub fn to_index(&self, b: u32) -> Option<u64> {
        let b = u64::from(b);
        self.symbols.iter().rev().try_fold(0u64, |acc, &s| {
            acc.checked_mul(b)?.checked_add(u64::from(s))
        })
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Natural logarithm of a probability or expectation. `-inf` encodes zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogProb(pub f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn exp(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

/// Number of coordinates in which `x` and `y` differ.
pub fn hamming_distance(x: &Genotype, y: &Genotype) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(x.symbols.iter().zip(&y.symbols).filter(|(a, b)| a != b).count())
}

fn check_distance(p: &ModelParams, m: usize) -> Result<()> {
    if m > p.d {
        return Err(Error::domain(format!("distance m = {m} outside [0, {}]", p.d)));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time t = {t} must be >= 0")));
    }
    Ok(())
}

/// `log q_m(t)`: log-probability that the unit-rate walk moves between two
/// fixed vertices at Hamming distance `m` in time `t`.
///
/// `q_m(t) = b^-d (1 + (b-1) e^-u)^(d-m) (1 - e^-u)^m` with `u = b t / ((b-1) d)`.
/// Only `b` and `d` are read from `p`; `t` is in rescaled units.
pub fn transition_log_prob(p: &ModelParams, m: usize, t: f64) -> Result<LogProb> {
    check_distance(p, m)?;
    check_time(t)?;
    if t == 0.0 {
        return Ok(if m == 0 { LogProb::ONE } else { LogProb::ZERO });
    }
    let b = f64::from(p.b);
    let d = p.d as f64;
    let m_f = m as f64;
    let u = p.mixing_rate() * t;
    let stay = ((b - 1.0) * (-u).exp()).ln_1p();
    let mut lp = -d * b.ln() + (d - m_f) * stay;
    if m > 0 {
        lp += m_f * (-(-u).exp_m1()).ln();
    }
    Ok(LogProb(lp))
}

/// `log E[N_0(t)] = t log(rho) + log q_m(t)`, in rescaled time.
pub fn expected_particles_log(p: &ModelParams, m: usize, t: f64) -> Result<LogProb> {
    let q = transition_log_prob(p, m, t)?;
    Ok(LogProb(t * p.log_rho() + q.0))
}

/// Expected total time spent at the target up to rescaled time `t`:
/// the integral of `E[N_0(s)]` over `[0, t]`.
pub fn expected_occupation_time(p: &ModelParams, m: usize, t: f64) -> Result<f64> {
    check_distance(p, m)?;
    check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let log_f = |s: f64| expected_particles_log(p, m, s).map(|l| l.0).unwrap_or(f64::NEG_INFINITY);
    quadrature::integrate_log(log_f, 0.0, t, quadrature::Tolerance::default())
}

/// Per-particle rates of the distance-to-target process at distance `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedRates {
    /// Rate of moving to distance `k - 1`.
    pub down: f64,
    /// Rate of changing a mismatched symbol to another mismatched symbol.
    pub lateral: f64,
    /// Rate of moving to distance `k + 1`.
    pub up: f64,
}

impl ProjectedRates {
    pub fn total(&self) -> f64 {
        self.down + self.lateral + self.up
    }
}

/// Mutation rates of a single particle at distance `k` from the target,
/// projected onto the distance.
///
/// A mutation picks one of `d` coordinates and one of `b - 1` replacement
/// symbols uniformly. Of the `(b - 1) d` equally likely outcomes, `k` repair a
/// mismatch, `k (b - 2)` swap one mismatch for another and `(d - k)(b - 1)`
/// create a new mismatch.
pub fn projected_rates(p: &ModelParams, k: usize) -> Result<ProjectedRates> {
    check_distance(p, k)?;
    let slots = (p.b as usize - 1) * p.d;
    let down_slots = k;
    let lateral_slots = k * (p.b as usize - 2);
    let up_slots = slots - down_slots - lateral_slots;
    let scale = p.lambda2 / slots as f64;
    Ok(ProjectedRates {
        down: down_slots as f64 * scale,
        lateral: lateral_slots as f64 * scale,
        up: up_slots as f64 * scale,
    })
}

/// Applies one mutation: a uniformly chosen coordinate is replaced by a
/// uniformly chosen different symbol.
pub fn mutate<R: Rng + ?Sized>(g: &Genotype, p: &ModelParams, rng: &mut R) -> Genotype {
    let mut out = g.clone();
    let i = rng.random_range(0..out.symbols.len());
    let shift = rng.random_range(1..p.b) as u8;
    let old = u32::from(out.symbols[i]);
    out.symbols[i] = ((old + u32::from(shift)) % p.b) as u8;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn g(s: &[u8], b: u32) -> Genotype {
        Genotype::new(s.to_vec(), b).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1, 4, 1.0, 1.0).is_err());
        assert!(ModelParams::new(2, 0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(2, 4, 0.0, 1.0).is_err());
        assert!(ModelParams::new(2, 4, 1.0, -1.0).is_err());
        let p = ModelParams::new(3, 5, 0.5, 2.0).unwrap();
        assert!(p.rho() > 1.0);
        let r = p.rescaled();
        assert_eq!(r.lambda2, 1.0);
        assert!((r.lambda1 - 0.25).abs() < 1e-15);
        assert!((p.to_raw_time(p.to_rescaled_time(3.0)) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn hamming_examples() {
        let x = g(&[0, 1, 2, 3, 0], 4);
        assert_eq!(hamming_distance(&x, &x).unwrap(), 0);
        assert_eq!(hamming_distance(&g(&[0; 4], 2), &g(&[1; 4], 2)).unwrap(), 4);
        assert_eq!(hamming_distance(&x, &g(&[0, 2, 2, 1, 3], 4)).unwrap(), 3);
        assert!(matches!(
            hamming_distance(&x, &g(&[0, 1], 4)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn genotype_rejects_bad_symbols() {
        assert!(Genotype::new(vec![0, 2], 2).is_err());
        let x = Genotype::from_index(57, 5, 3);
        assert_eq!(x.to_index(3), Some(57));
    }

    #[test]
    fn transition_at_time_zero() {
        let p = ModelParams::new(2, 10, 0.4, 1.0).unwrap();
        assert_eq!(transition_log_prob(&p, 0, 0.0).unwrap().value(), 0.0);
        assert!(transition_log_prob(&p, 3, 0.0).unwrap().is_zero());
        assert!(transition_log_prob(&p, 3, -1.0).is_err());
        assert!(transition_log_prob(&p, 11, 1.0).is_err());
    }

    #[test]
    fn transition_small_case_matches_8x8_matrix_exponential() {
        // Unit-rate walk on {0,1}^3: each neighbour is reached at rate 1/3.
        let p = ModelParams::new(2, 3, 0.1, 1.0).unwrap();
        let q = nalgebra::DMatrix::<f64>::from_fn(8, 8, |i, j| {
            let h = (i ^ j).count_ones();
            match h {
                0 => -1.0,
                1 => 1.0 / 3.0,
                _ => 0.0,
            }
        });
        let e = (q * 1.0).exp();
        for j in 0..8usize {
            let m = j.count_ones() as usize;
            let ours = transition_log_prob(&p, m, 1.0).unwrap().exp();
            assert!((ours - e[(0, j)]).abs() < 1e-10, "m = {m}");
        }
    }

    #[test]
    fn first_moment_at_zero_is_one() {
        let p = ModelParams::new(3, 7, 0.3, 1.0).unwrap();
        assert!(expected_particles_log(&p, 0, 0.0).unwrap().value().abs() < 1e-15);
    }

    #[test]
    fn occupation_time_zero_interval() {
        let p = ModelParams::new(2, 8, 0.3, 1.0).unwrap();
        assert_eq!(expected_occupation_time(&p, 1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn occupation_time_pure_walk_closed_form() {
        // With lambda1 -> 0 the integrand is q_0(s); expanding the binomial
        // gives sum_j C(d,j)(b-1)^j b^-d (1 - e^{-k j t}) / (k j).
        let (b, d, t) = (3u32, 6usize, 0.7);
        let p = ModelParams::new(b, d, 1e-14, 1.0).unwrap();
        let k = p.mixing_rate();
        let bf = f64::from(b);
        let mut closed = 0.0;
        for j in 0..=d {
            let w = counting::binomial(d as u64, j as u64).to_string().parse::<f64>().unwrap()
                * (bf - 1.0).powi(j as i32)
                / bf.powi(d as i32);
            closed += if j == 0 { w * t } else { w * (1.0 - (-k * j as f64 * t).exp()) / (k * j as f64) };
        }
        let ours = expected_occupation_time(&p, 0, t).unwrap();
        assert!((ours - closed).abs() < 1e-9 * closed, "{ours} vs {closed}");
    }

    #[test]
    fn occupation_time_matches_fine_riemann_sum() {
        let p = ModelParams::from_rho(2, 8, 1.5).unwrap();
        let t = 5.0;
        let n = 200_000;
        let h = t / n as f64;
        // midpoint rule, error O(h^2)
        let riemann: f64 = (0..n)
            .map(|i| expected_particles_log(&p, 1, (i as f64 + 0.5) * h).unwrap().exp() * h)
            .sum();
        let ours = expected_occupation_time(&p, 1, t).unwrap();
        assert!((ours - riemann).abs() < 1e-7 * riemann, "{ours} vs {riemann}");
    }

    #[test]
    fn projected_rate_examples() {
        let p = ModelParams::new(4, 10, 0.5, 1.0).unwrap();
        let r0 = projected_rates(&p, 0).unwrap();
        assert_eq!((r0.down, r0.lateral, r0.up), (0.0, 0.0, 1.0));
        let r = projected_rates(&p, 3).unwrap();
        assert!((r.down - 0.1).abs() < 1e-15);
        assert!((r.lateral - 0.2).abs() < 1e-15);
        assert!((r.up - 0.7).abs() < 1e-15);
        let p2 = ModelParams::new(2, 9, 0.5, 2.5).unwrap();
        for k in 0..=9 {
            let r = projected_rates(&p2, k).unwrap();
            assert_eq!(r.lateral, 0.0);
            assert!((r.total() - 2.5).abs() <= 1e-15 * 2.5);
        }
        assert!(projected_rates(&p2, 10).is_err());
    }

    #[test]
    fn projected_rates_match_mutation_operator_statistics() {
        let p = ModelParams::new(4, 10, 0.5, 1.0).unwrap();
        let target = Genotype::origin(10);
        let start = Genotype::new(vec![1, 2, 3, 0, 0, 0, 0, 0, 0, 0], 4).unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(11);
        let n = 200_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            let k = hamming_distance(&mutate(&start, &p, &mut rng), &target).unwrap();
            match k {
                2 => counts[0] += 1,
                3 => counts[1] += 1,
                4 => counts[2] += 1,
                _ => unreachable!(),
            }
        }
        let expected = [0.1, 0.2, 0.7];
        for (c, e) in counts.iter().zip(expected) {
            let f = *c as f64 / n as f64;
            let se = (e * (1.0 - e) / n as f64).sqrt();
            assert!((f - e).abs() < 5.0 * se, "{f} vs {e}");
        }
    }

    #[test]
    fn mutate_changes_exactly_one_coordinate() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
        let p2 = ModelParams::new(2, 12, 1.0, 1.0).unwrap();
        let x = Genotype::from_index(0b1010_1100_0011, 12, 2);
        for _ in 0..1000 {
            let y = mutate(&x, &p2, &mut rng);
            assert_eq!(hamming_distance(&x, &y).unwrap(), 1);
            let i = (0..12).find(|&i| x.symbols()[i] != y.symbols()[i]).unwrap();
            assert_eq!(y.symbols()[i], 1 - x.symbols()[i]);
        }
        let p5 = ModelParams::new(5, 6, 1.0, 1.0).unwrap();
        let z = Genotype::from_index(1234, 6, 5);
        for _ in 0..1000 {
            assert_eq!(hamming_distance(&z, &mutate(&z, &p5, &mut rng)).unwrap(), 1);
        }
    }

    #[test]
    fn mutate_coordinate_choice_is_uniform() {
        // chi-square over d = 8 coordinates at 1e5 draws; 7 dof, p = 0.01 -> 18.475
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(99);
        let p = ModelParams::new(3, 8, 1.0, 1.0).unwrap();
        let x = Genotype::origin(8);
        let n = 100_000;
        let mut hits = [0usize; 8];
        for _ in 0..n {
            let y = mutate(&x, &p, &mut rng);
            let i = (0..8).find(|&i| y.symbols()[i] != 0).unwrap();
            hits[i] += 1;
        }
        let e = n as f64 / 8.0;
        let chi2: f64 = hits.iter().map(|&h| (h as f64 - e).powi(2) / e).sum();
        assert!(chi2 < 18.475, "chi2 = {chi2}");
    }
}
