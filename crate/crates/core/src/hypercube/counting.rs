//! Exact vertex counts on the hypercube.
//!
//! Binomial coefficients follow the convention that `C(n, k)` is nonzero only
//! for integer `k` in `[0, n]`; `0^0 = 1`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Exact `C(n, k)`, zero for `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` over signed arguments, zero unless `0 <= k <= n`.
fn binom_signed(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        BigUint::zero()
    } else {
        binomial(n as u64, k as u64)
    }
}

/// `C(n, num / 2)`, zero when `num` is odd or out of range.
fn binom_half(n: i64, num: i64) -> BigUint {
    if num < 0 || num % 2 != 0 {
        BigUint::zero()
    } else {
        binom_signed(n, num / 2)
    }
}

fn pow_signed(base: u64, exp: i64) -> BigUint {
    // Callers only reach this with exp >= 0 when the accompanying binomial is nonzero.
    debug_assert!(exp >= 0);
    BigUint::from(base).pow(exp.max(0) as u32)
}

/// Natural log of `C(n, k)` via log-gamma; `-inf` for `k > n`.
pub fn log_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn check_sphere(d: u64, b: u32, m: u64) -> Result<()> {
    if b < 2 {
        return Err(Error::domain(format!("alphabet size b = {b} must be >= 2")));
    }
    if m > d {
        return Err(Error::domain(format!("radius m = {m} outside [0, {d}]")));
    }
    Ok(())
}

/// Number of vertices at Hamming distance `m` from a fixed vertex:
/// `C(d, m) (b - 1)^m`.
pub fn sphere_size(d: u64, b: u32, m: u64) -> Result<BigUint> {
    check_sphere(d, b, m)?;
    Ok(binomial(d, m) * BigUint::from(b - 1).pow(m as u32))
}

/// Natural log of [`sphere_size`], usable for `d` up to `10^6` and beyond.
pub fn log_sphere_size(d: u64, b: u32, m: u64) -> Result<f64> {
    check_sphere(d, b, m)?;
    Ok(log_binomial(d, m) + m as f64 * f64::from(b - 1).ln())
}

/// Number of vertices `y` with `|y| = l_prime` and `d_H(x, y) = l`, for a
/// fixed `x` with `|x| = m` (norms are distances from the origin).
///
/// Sums over `i`, the number of coordinates where `y` repeats a nonzero symbol
/// of `x`.
pub fn count_at_distance_pair(d: u64, b: u32, m: u64, l: u64, l_prime: u64) -> Result<BigUint> {
    if b < 2 {
        return Err(Error::domain(format!("alphabet size b = {b} must be >= 2")));
    }
    for (name, v) in [("m", m), ("l", l), ("l'", l_prime)] {
        if v > d {
            return Err(Error::domain(format!("{name} = {v} outside [0, {d}]")));
        }
    }
    let (d, m, l, lp) = (d as i64, m as i64, l as i64, l_prime as i64);
    let mut total = BigUint::zero();
    for i in 0..=m {
        let c = binom_signed(m, i)
            * binom_signed(m - i, i + l - lp)
            * binom_signed(d - m, i + l - m);
        if c.is_zero() {
            continue;
        }
        let other = lp - l + m - 2 * i;
        let fresh = i + l - m;
        total += c * pow_signed(u64::from(b) - 2, other) * pow_signed(u64::from(b) - 1, fresh);
    }
    Ok(total)
}

/// Binary hypercube only. For a fixed `x0` with `|x0| = m`, the number of
/// triples `(x1, x2, x3)` with `d_H(x0, x1) = l1`, `d_H(x1, x2) = l2`,
/// `d_H(x1, x3) = l3`, `|x2| = k` and `|x3| = k_prime`.
///
/// The sum runs over `l = |x1|`; every binomial with a half-integer lower
/// argument vanishes.
pub fn count_triples(
    d: u64,
    m: u64,
    l1: u64,
    l2: u64,
    l3: u64,
    k: u64,
    k_prime: u64,
) -> Result<BigUint> {
    for (name, v) in [("m", m), ("l1", l1), ("l2", l2), ("l3", l3), ("k", k), ("k'", k_prime)] {
        if v > d {
            return Err(Error::domain(format!("{name} = {v} outside [0, {d}]")));
        }
    }
    let [d, m, l1, l2, l3, k, kp] = [d, m, l1, l2, l3, k, k_prime].map(|v| v as i64);
    let mut total = BigUint::zero();
    for l in 0..=d {
        let first = binom_half(m, m + l1 - l) * binom_half(d - m, l + l1 - m);
        if first.is_zero() {
            continue;
        }
        let second = binom_half(l, l + l2 - k) * binom_half(d - l, l2 + k - l);
        if second.is_zero() {
            continue;
        }
        let third = binom_half(l, l + l3 - kp) * binom_half(d - l, l3 + kp - l);
        total += first * second * third;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamming(x: u64, y: u64, d: usize, b: u64) -> usize {
        let (mut x, mut y) = (x, y);
        let mut h = 0;
        for _ in 0..d {
            if x % b != y % b {
                h += 1;
            }
            x /= b;
            y /= b;
        }
        h
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(5, 6), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert!((log_binomial(50, 20) - binomial(50, 20).to_string().parse::<f64>().unwrap().ln()).abs() < 1e-10);
    }

    #[test]
    fn sphere_size_examples() {
        assert_eq!(sphere_size(7, 3, 0).unwrap(), BigUint::one());
        assert_eq!(sphere_size(3, 2, 2).unwrap(), BigUint::from(3u32));
        assert!(sphere_size(3, 2, 4).is_err());
        // brute force over all 4^5 genotypes
        let brute = (0..4u64.pow(5)).filter(|&y| hamming(0, y, 5, 4) == 2).count();
        assert_eq!(brute, 90);
        assert_eq!(sphere_size(5, 4, 2).unwrap(), BigUint::from(90u32));
    }

    #[test]
    fn log_sphere_size_at_large_d() {
        let exact = sphere_size(10_000, 4, 300).unwrap();
        let bits = exact.bits() as f64;
        let approx = log_sphere_size(10_000, 4, 300).unwrap();
        // log2 of a big integer lies in [bits - 1, bits)
        let log2 = approx / std::f64::consts::LN_2;
        assert!(log2 <= bits && log2 >= bits - 1.0);
        assert!(log_sphere_size(1_000_000, 2, 500_000).unwrap().is_finite());
    }

    #[test]
    fn pair_counts_match_enumeration() {
        for b in 2u64..=3 {
            for d in 1usize..=5 {
                let n = b.pow(d as u32);
                for x in 0..n {
                    let m = hamming(x, 0, d, b);
                    // only one representative per norm is needed
                    if (0..x).any(|z| hamming(z, 0, d, b) == m) {
                        continue;
                    }
                    let mut table = vec![vec![0u64; d + 1]; d + 1];
                    for y in 0..n {
                        table[hamming(x, y, d, b)][hamming(y, 0, d, b)] += 1;
                    }
                    for l in 0..=d {
                        for lp in 0..=d {
                            let c = count_at_distance_pair(d as u64, b as u32, m as u64, l as u64, lp as u64)
                                .unwrap();
                            assert_eq!(c, BigUint::from(table[l][lp]), "b={b} d={d} m={m} l={l} l'={lp}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pair_counts_trivial_cases() {
        for m in 0..=6u64 {
            for lp in 0..=6u64 {
                let c = count_at_distance_pair(6, 4, m, 0, lp).unwrap();
                assert_eq!(c, if lp == m { BigUint::one() } else { BigUint::zero() });
            }
        }
        let mut total = BigUint::zero();
        for l in 0..=7 {
            for lp in 0..=7 {
                total += count_at_distance_pair(7, 5, 3, l, lp).unwrap();
            }
        }
        assert_eq!(total, BigUint::from(5u32).pow(7));
        assert!(count_at_distance_pair(4, 2, 5, 0, 0).is_err());
    }

    #[test]
    fn triple_counts_match_enumeration() {
        for d in 1usize..=5 {
            let n = 1u64 << d;
            for m in 0..=d {
                let x0 = (1u64 << m) - 1;
                let dim = d + 1;
                let mut hist = vec![0u64; dim.pow(5)];
                let idx = |a: usize, b: usize, c: usize, e: usize, f: usize| {
                    (((a * dim + b) * dim + c) * dim + e) * dim + f
                };
                for x1 in 0..n {
                    let l1 = (x0 ^ x1).count_ones() as usize;
                    for x2 in 0..n {
                        let l2 = (x1 ^ x2).count_ones() as usize;
                        let k = x2.count_ones() as usize;
                        for x3 in 0..n {
                            let l3 = (x1 ^ x3).count_ones() as usize;
                            let kp = x3.count_ones() as usize;
                            hist[idx(l1, l2, l3, k, kp)] += 1;
                        }
                    }
                }
                for l1 in 0..dim {
                    for l2 in 0..dim {
                        for l3 in 0..dim {
                            for k in 0..dim {
                                for kp in 0..dim {
                                    let c = count_triples(
                                        d as u64, m as u64, l1 as u64, l2 as u64, l3 as u64, k as u64,
                                        kp as u64,
                                    )
                                    .unwrap();
                                    assert_eq!(c, BigUint::from(hist[idx(l1, l2, l3, k, kp)]));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn triple_counts_with_coinciding_points() {
        let d = 6;
        for m in 0..=d {
            for k in 0..=d {
                for kp in 0..=d {
                    let c = count_triples(d, m, 0, 0, 0, k, kp).unwrap();
                    let expect = if k == m && kp == m { 1u32 } else { 0 };
                    assert_eq!(c, BigUint::from(expect));
                }
            }
        }
    }

    #[test]
    fn vandermonde_aggregate_bound() {
        for d in 1..=14i64 {
            for m in 0..=d {
                for lp in 0..=d {
                    let mut lhs = BigUint::zero();
                    for l in 0..=d {
                        for i in 0..=m {
                            lhs += binom_signed(m, i)
                                * binom_signed(m - i, i + l - lp)
                                * binom_signed(d - m, i + l - m);
                        }
                    }
                    let rhs = binomial(d as u64, lp as u64) * BigUint::from(2u32).pow(lp as u32);
                    assert!(lhs <= rhs, "d={d} m={m} l'={lp}");
                }
            }
        }
    }
}
