//! The first-moment equation `rho^t q_m(t) = 1` and its root.

use serde::{Deserialize, Serialize};

use super::regimes::x0_from_log_rho;
use super::SolverConfig;
use crate::error::{Error, Result};
use crate::hypercube::ModelParams;

/// `phi(t) = log(rho^t q_m(t))`, in rescaled time.
///
/// `phi(t) = t log rho - d log b + (d - m) log(1 + (b-1) e^-u) + m log(1 - e^-u)`
/// with `u = b t / ((b-1) d)`.
pub fn first_moment_residual(p: &ModelParams, m: usize, t: f64) -> Result<f64> {
    if m > p.d {
        return Err(Error::domain(format!("distance m = {m} outside [0, {}]", p.d)));
    }
    if !(t > 0.0) {
        return Err(Error::domain(format!("phi is evaluated at t > 0, got t = {t}")));
    }
    Ok(phi(p, m, t))
}

fn phi(p: &ModelParams, m: usize, t: f64) -> f64 {
    let b = f64::from(p.b);
    let d = p.d as f64;
    let m = m as f64;
    let u = p.mixing_rate() * t;
    let e = (-u).exp();
    // (d - m) log(1 + (b-1)e^-u) - d log b, regrouped so the large-d
    // cancellation happens inside log1p
    let stay = ((b - 1.0) / b * (-u).exp_m1()).ln_1p();
    let mut v = t * p.log_rho() + d * stay - m * ((b - 1.0) * e).ln_1p();
    if m > 0.0 {
        v += m * (-(-u).exp_m1()).ln();
    }
    v
}

/// Where a root was found and how the scan went.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    pub t: f64,
    /// Final bracket around the root.
    pub bracket: (f64, f64),
    /// The scanned window.
    pub window: (f64, f64),
    /// Sign changes of `phi` seen over the whole window; 1 when the root is unique.
    pub sign_changes: usize,
}

/// Smallest strictly positive root of the first-moment equation.
pub fn solve_first_moment(p: &ModelParams, m: usize) -> Result<f64> {
    solve_first_moment_report(p, m, &SolverConfig::default()).map(|r| r.t)
}

/// [`solve_first_moment`] with the scan diagnostics.
///
/// For `rho < e` the scan starts at `x0 d`, below which `phi < 0`
/// (`phi(t) <= d h(t / d)` with `h` the function defining `x0`). For `rho >= e`
/// it starts at a small time where `phi < 0`. It then steps geometrically to
/// the end of the window, counting sign changes, and refines the first one
/// with Brent's method.
///
/// With `m = 0` and `rho < e` the smallest positive root is exactly `x0 d`.
pub fn solve_first_moment_report(p: &ModelParams, m: usize, cfg: &SolverConfig) -> Result<RootReport> {
    if m > p.d {
        return Err(Error::domain(format!("distance m = {m} outside [0, {}]", p.d)));
    }
    let d = p.d as f64;
    let log_rho = p.log_rho();
    let log_b = f64::from(p.b).ln();
    let slow = log_rho < 1.0;

    let denom = if slow || log_rho - 1.0 < 1e-3 { log_rho } else { log_rho - 1.0 };
    let hi = 4.0 * d * log_b / denom + 4.0 * d;

    let mut lo = if slow {
        let x0 = x0_from_log_rho(p.b, log_rho)?;
        if m == 0 {
            let t = x0 * d;
            return Ok(RootReport { t, bracket: (t, t), window: (t, hi), sign_changes: 1 });
        }
        x0 * d
    } else {
        1e-6
    };
    if m == 0 && !slow {
        // phi > 0 just above 0; look for a return below zero
        return scan(p, m, lo, hi, cfg);
    }
    let mut f = phi(p, m, lo);
    while f >= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::Numeric {
                method: "first-moment scan",
                detail: format!("phi stays nonnegative down to t = {lo:e}"),
            });
        }
        f = phi(p, m, lo);
    }
    scan(p, m, lo, hi, cfg)
}

fn scan(p: &ModelParams, m: usize, lo: f64, hi: f64, cfg: &SolverConfig) -> Result<RootReport> {
    let f_lo = phi(p, m, lo);
    let mut t = lo;
    let mut f = f_lo;
    let mut first: Option<(f64, f64, f64, f64)> = None;
    let mut changes = 0;
    while t < hi {
        let next = (t * cfg.scan_ratio).min(hi);
        let f_next = phi(p, m, next);
        if (f < 0.0) != (f_next < 0.0) {
            changes += 1;
            if first.is_none() {
                first = Some((t, next, f, f_next));
            }
        }
        t = next;
        f = f_next;
    }
    let Some((a, b, fa, fb)) = first else {
        return Err(Error::NoRoot { lo, hi, phi_lo: f_lo, phi_hi: f });
    };
    let (root, bracket) = brent(|x| phi(p, m, x), a, b, fa, fb, cfg)?;
    Ok(RootReport { t: root, bracket, window: (lo, hi), sign_changes: changes })
}

/// Brent's method on a sign-changing bracket. Returns the root and the final bracket.
pub(crate) fn brent<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    cfg: &SolverConfig,
) -> Result<(f64, (f64, f64))> {
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    if fa == 0.0 {
        return Ok((a, (a, a)));
    }
    if fb == 0.0 {
        return Ok((b, (b, b)));
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut bisected = true;
    let mut dprev = 0.0;
    for _ in 0..cfg.max_iterations {
        let tol = cfg.root_rel_tol * b.abs().max(1.0);
        if fb == 0.0 || (b - a).abs() <= tol {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            return Ok((b, (lo, hi)));
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let q = (3.0 * a + b) / 4.0;
        let outside = !((s > q.min(b)) && (s < q.max(b)));
        if outside
            || (bisected && (s - b).abs() >= (b - c).abs() / 2.0)
            || (!bisected && (s - b).abs() >= (c - dprev).abs() / 2.0)
            || (bisected && (b - c).abs() < tol)
            || (!bisected && (c - dprev).abs() < tol)
        {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s);
        dprev = c;
        c = b;
        fc = fb;
        if (fa < 0.0) != (fs < 0.0) {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Err(Error::Numeric {
        method: "brent",
        detail: format!("no convergence in {} iterations, bracket [{a}, {b}]", cfg.max_iterations),
    })
}
