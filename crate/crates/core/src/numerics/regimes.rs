//! Regime constants and the three regime predictors.

use serde::{Deserialize, Serialize};

use super::first_moment::{brent, solve_first_moment_report};
use super::lambert::lambert_w0;
use super::{FptPrediction, Regime, SolverConfig, Warning};
use crate::error::{Error, Result};
use crate::hypercube::ModelParams;

/// `h(x) = x log rho - log b + log(1 + (b-1) e^{-bx/(b-1)})`, written so that
/// small `x` does not cancel.
fn h(b: f64, log_rho: f64, x: f64) -> f64 {
    x * log_rho + ((b - 1.0) / b * (-b * x / (b - 1.0)).exp_m1()).ln_1p()
}

pub(crate) fn x0_from_log_rho(b: u32, log_rho: f64) -> Result<f64> {
    if !(log_rho > 0.0 && log_rho < 1.0) {
        return Err(Error::regime(format!(
            "x0 needs rho in (1, e), got log rho = {log_rho}"
        )));
    }
    let bf = f64::from(b);
    // h is convex with h(0) = 0 and h'(0) = log rho - 1 < 0, so h(x)/x is
    // increasing and changes sign exactly at x0
    let g = |x: f64| if x == 0.0 { log_rho - 1.0 } else { h(bf, log_rho, x) / x };
    let mut hi = 1.0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Numeric { method: "x0 bracket", detail: format!("log rho = {log_rho}") });
        }
    }
    let cfg = SolverConfig { root_rel_tol: 1e-15, ..SolverConfig::default() };
    let (x, _) = brent(g, 0.0, hi, log_rho - 1.0, g(hi), &cfg)?;
    Ok(x)
}

/// `x0(b, rho)`: the positive root of `x log rho - log b + log(1 + (b-1) e^{-bx/(b-1)}) = 0`.
pub fn x0(b: u32, rho: f64) -> Result<f64> {
    x0_from_log_rho(b, rho.ln())
}

/// Constants of the slow-regime expansion `t ~ x0 d + r m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeConstants {
    pub x0: f64,
    pub r: f64,
    /// `exp(-b x0 / (b - 1))`.
    pub alpha: f64,
}

impl RegimeConstants {
    /// Residual of the equation defining `x0`.
    pub fn x0_residual(&self, b: u32, log_rho: f64) -> f64 {
        h(f64::from(b), log_rho, self.x0)
    }

    /// Residual of `r log rho = log((1 + (b-1)a)/(1 - a)) + b r / (b - 1 + 1/a)`.
    pub fn r_residual(&self, b: u32, log_rho: f64) -> f64 {
        let b = f64::from(b);
        let a = self.alpha;
        self.r * log_rho
            - ((b - 1.0) * a).ln_1p()
            + (-a).ln_1p()
            - b * self.r / (b - 1.0 + 1.0 / a)
    }
}

/// `x0`, `r` and `alpha` for `rho` in `[1 + guard, e - guard]`.
pub fn regime_constants(b: u32, rho: f64) -> Result<RegimeConstants> {
    regime_constants_log(b, rho.ln(), &SolverConfig::default())
}

pub(crate) fn regime_constants_log(b: u32, log_rho: f64, cfg: &SolverConfig) -> Result<RegimeConstants> {
    let rho = log_rho.exp();
    if !(rho >= 1.0 + cfg.rho_guard && rho <= std::f64::consts::E - cfg.rho_guard) {
        return Err(Error::regime(format!(
            "regime constants need rho in [1 + {g}, e - {g}], got {rho}",
            g = cfg.rho_guard
        )));
    }
    let x0 = x0_from_log_rho(b, log_rho)?;
    let bf = f64::from(b);
    let alpha = (-bf * x0 / (bf - 1.0)).exp();
    let num = ((bf - 1.0) * alpha).ln_1p() - (-alpha).ln_1p();
    let den = log_rho - bf / (bf - 1.0 + 1.0 / alpha);
    Ok(RegimeConstants { x0, r: num / den, alpha })
}

fn check_m(p: &ModelParams, m: usize) -> Result<()> {
    if m > p.d {
        return Err(Error::domain(format!("distance m = {m} outside [0, {}]", p.d)));
    }
    Ok(())
}

fn window_warning(d: usize, m: usize, l: f64) -> Option<Warning> {
    let limit = d as f64 / l;
    (m as f64 > limit).then_some(Warning::DistanceAboveWindow { limit })
}

/// Slow regime, `rho` in `(1, e)`: `t_predicted = x0 d + r m`.
pub fn predict_slow(p: &ModelParams, m: usize, cfg: &SolverConfig) -> Result<FptPrediction> {
    check_m(p, m)?;
    let log_rho = p.log_rho();
    if !(log_rho < 1.0) {
        return Err(Error::regime(format!("slow regime needs rho < e, got rho = {}", p.rho())));
    }
    if m == 0 {
        return Ok(FptPrediction::zero(Regime::SlowConstantRho));
    }
    let c = regime_constants_log(p.b, log_rho, cfg)?;
    let root = solve_first_moment_report(p, m, cfg)?;
    let leading = c.x0 * p.d as f64;
    let linear = c.r * m as f64;
    let mut warnings: Vec<Warning> = window_warning(p.d, m, cfg.l1).into_iter().collect();
    if root.sign_changes > 1 {
        warnings.push(Warning::MultipleRoots { sign_changes: root.sign_changes });
    }
    Ok(FptPrediction {
        regime: Regime::SlowConstantRho,
        m,
        t_first_moment: Some(root.t),
        t_predicted: leading + linear,
        terms: vec![("leading".into(), leading), ("m_term".into(), linear)],
        warnings,
    })
}

fn check_fast(p: &ModelParams, m: usize) -> Result<f64> {
    check_m(p, m)?;
    let l = p.log_rho() - 1.0;
    if !(l > 0.0) {
        return Err(Error::regime(format!("fast regime needs rho > e, got rho = {}", p.rho())));
    }
    Ok(l)
}

fn lambert_time(p: &ModelParams, m: usize, l: f64, scale: f64) -> Result<f64> {
    let mf = m as f64;
    let arg = l * f64::from(p.b - 1) * p.d as f64 * scale / mf;
    Ok(mf * lambert_w0(arg)? / l)
}

/// Fast regime, `rho > e`: the positive solution of
/// `(rho/e)^t (t / ((b-1) d))^m = 1`, namely `m W((log rho - 1)(b-1) d / m) / (log rho - 1)`.
pub fn predict_fast(p: &ModelParams, m: usize, cfg: &SolverConfig) -> Result<FptPrediction> {
    let l = check_fast(p, m)?;
    if m == 0 {
        return Ok(FptPrediction::zero(Regime::FastConstantRho));
    }
    let t = lambert_time(p, m, l, 1.0)?;
    let mut warnings: Vec<Warning> = window_warning(p.d, m, cfg.l1).into_iter().collect();
    let root = match solve_first_moment_report(p, m, cfg) {
        Ok(r) => {
            if r.sign_changes > 1 {
                warnings.push(Warning::MultipleRoots { sign_changes: r.sign_changes });
            }
            Some(r.t)
        }
        Err(Error::NoRoot { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(FptPrediction {
        regime: Regime::FastConstantRho,
        m,
        t_first_moment: root,
        t_predicted: t,
        terms: vec![("leading".into(), t)],
        warnings,
    })
}

/// The barrier time `t_bar`: the positive solution of
/// `(rho/e)^t (t / ((b-1) d))^m = m`.
pub fn bar_t(p: &ModelParams, m: usize) -> Result<f64> {
    let l = check_fast(p, m)?;
    if m == 0 {
        return Err(Error::domain("bar_t needs m >= 1"));
    }
    let mf = m as f64;
    lambert_time(p, m, l, mf.powf(1.0 / mf))
}

/// A map `d -> log rho(d)` for the ultra-slow regime.
///
/// Working with `log rho` keeps full precision when `rho` is within rounding
/// of 1. Any `Fn(usize) -> f64` returning `log rho` is a schedule.
pub trait RhoSchedule {
    fn log_rho(&self, d: usize) -> f64;
}

impl<F: Fn(usize) -> f64> RhoSchedule for F {
    fn log_rho(&self, d: usize) -> f64 {
        self(d)
    }
}

/// `log rho(d) = coefficient * d^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRhoPower {
    pub coefficient: f64,
    pub exponent: f64,
}

impl RhoSchedule for LogRhoPower {
    fn log_rho(&self, d: usize) -> f64 {
        self.coefficient * (d as f64).powf(self.exponent)
    }
}

/// `log rho(d) = coefficient / log d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRhoInverseLog {
    pub coefficient: f64,
}

impl RhoSchedule for LogRhoInverseLog {
    fn log_rho(&self, d: usize) -> f64 {
        self.coefficient / (d as f64).ln()
    }
}

/// Ultra-slow regime along a schedule, binary alphabet only.
pub fn predict_ultraslow<S: RhoSchedule + ?Sized>(
    schedule: &S,
    d: usize,
    m: usize,
    cfg: &SolverConfig,
) -> Result<FptPrediction> {
    let p = ModelParams::new(2, d, schedule.log_rho(d), 1.0)?;
    predict_ultraslow_at(&p, m, cfg)
}

/// Ultra-slow prediction at one parameter set:
/// `t_predicted = t_root + log(log rho) / log rho`.
///
/// Terms: `d log 2 / log rho`, the remainder of the root, and the correction.
pub fn predict_ultraslow_at(p: &ModelParams, m: usize, cfg: &SolverConfig) -> Result<FptPrediction> {
    if p.b != 2 {
        return Err(Error::Unsupported(format!(
            "ultra-slow predictor is for b = 2, got b = {}",
            p.b
        )));
    }
    check_m(p, m)?;
    if m == 0 {
        return Ok(FptPrediction::zero(Regime::UltraSlow));
    }
    let log_rho = p.log_rho();
    let d = p.d as f64;
    let mut warnings = Vec::new();
    if log_rho < cfg.l2 / d {
        warnings.push(Warning::LogRhoBelowWindow { limit: cfg.l2 / d });
    }
    if log_rho >= 1.0 {
        warnings.push(Warning::NotUltraSlow);
    }
    warnings.extend(window_warning(p.d, m, cfg.l3));
    let root = solve_first_moment_report(p, m, cfg)?;
    if root.sign_changes > 1 {
        warnings.push(Warning::MultipleRoots { sign_changes: root.sign_changes });
    }
    let leading = d * std::f64::consts::LN_2 / log_rho;
    let correction = log_rho.ln() / log_rho;
    Ok(FptPrediction {
        regime: Regime::UltraSlow,
        m,
        t_first_moment: Some(root.t),
        t_predicted: root.t + correction,
        terms: vec![
            ("leading".into(), leading),
            ("m_term".into(), root.t - leading),
            ("correction".into(), correction),
        ],
        warnings,
    })
}

/// Dispatches on `regime`.
pub fn predict(p: &ModelParams, m: usize, regime: Regime, cfg: &SolverConfig) -> Result<FptPrediction> {
    match regime {
        Regime::SlowConstantRho => predict_slow(p, m, cfg),
        Regime::FastConstantRho => predict_fast(p, m, cfg),
        Regime::UltraSlow => predict_ultraslow_at(p, m, cfg),
    }
}

/// Per-unit-`d` delay of the passage time when the mutation rate rises from
/// `lambda2` to `lambda2p` at fixed branching rate, in original time units:
/// `x0(b, e^{l1/l2'}) / l2' - x0(b, e^{l1/l2}) / l2`.
pub fn mutation_delay_coefficient(b: u32, lambda1: f64, lambda2: f64, lambda2p: f64) -> Result<f64> {
    if !(lambda1 > 0.0 && lambda1 < lambda2 && lambda2 < lambda2p && lambda2p.is_finite()) {
        return Err(Error::domain(format!(
            "need 0 < lambda1 < lambda2 < lambda2', got {lambda1}, {lambda2}, {lambda2p}"
        )));
    }
    let slow = x0_from_log_rho(b, lambda1 / lambda2p)? / lambda2p;
    let base = x0_from_log_rho(b, lambda1 / lambda2)? / lambda2;
    Ok(slow - base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_satisfy_their_equations() {
        for b in [2u32, 3, 4, 10] {
            for rho in [1.05, 1.5, 2.0, 2.5, 2.7] {
                let c = regime_constants(b, rho).unwrap();
                let lr = f64::ln(rho);
                assert!(c.x0_residual(b, lr).abs() <= 1e-12, "b={b} rho={rho}");
                assert!(c.r_residual(b, lr).abs() <= 1e-12 * c.r.max(1.0), "b={b} rho={rho}");
                assert!(c.x0 > 0.0 && c.r > 0.0 && c.alpha > 0.0 && c.alpha < 1.0);
            }
        }
    }

    #[test]
    fn constants_outside_window_rejected() {
        assert!(regime_constants(2, 1.0).is_err());
        assert!(regime_constants(2, 2.8).is_err());
        assert!(regime_constants(2, std::f64::consts::E).is_err());
    }

    #[test]
    fn slow_prediction_terms() {
        let p = ModelParams::from_rho(4, 10_000, 2.0).unwrap();
        let cfg = SolverConfig::default();
        let pr = predict_slow(&p, 50, &cfg).unwrap();
        let sum: f64 = pr.terms.iter().map(|(_, v)| v).sum();
        assert!((sum - pr.t_predicted).abs() < 1e-9);
        assert!(pr.root_gap().unwrap().abs() < 2.0);
        assert!(pr.warnings.is_empty());
        assert!(predict_slow(&ModelParams::from_rho(2, 10, 3.0).unwrap(), 1, &cfg).is_err());
    }

    #[test]
    fn fast_identity() {
        let p = ModelParams::from_rho(2, 1000, 5.0).unwrap();
        let cfg = SolverConfig::default();
        for m in [1, 2, 5, 20] {
            let t = predict_fast(&p, m, &cfg).unwrap().t_predicted;
            let res = t * (5f64.ln() - 1.0) + m as f64 * (t / 1000.0).ln();
            assert!(res.abs() < 1e-9, "m={m} residual {res}");
        }
    }

    #[test]
    fn bar_t_relation() {
        let p = ModelParams::from_rho(2, 1000, 5.0).unwrap();
        let cfg = SolverConfig::default();
        for m in 1..10usize {
            let tb = bar_t(&p, m).unwrap();
            let res = tb * (5f64.ln() - 1.0) + m as f64 * (tb / 1000.0).ln() - (m as f64).ln();
            assert!(res.abs() < 1e-9);
            let t = predict_fast(&p, m, &cfg).unwrap().t_predicted;
            if m == 1 {
                assert!((tb - t).abs() < 1e-12);
            } else {
                assert!(tb >= t);
            }
        }
    }

    #[test]
    fn ultraslow_correction_negative() {
        let cfg = SolverConfig::default();
        let sched = LogRhoPower { coefficient: 1.0, exponent: -0.5 };
        let pr = predict_ultraslow(&sched, 400, 2, &cfg).unwrap();
        assert!(pr.t_predicted < pr.t_first_moment.unwrap());
        let sum: f64 = pr.terms.iter().map(|(_, v)| v).sum();
        assert!((sum - pr.t_predicted).abs() < 1e-9 * pr.t_predicted);
        let p3 = ModelParams::from_rho(3, 100, 1.1).unwrap();
        assert!(matches!(predict_ultraslow_at(&p3, 1, &cfg), Err(Error::Unsupported(_))));
        let weak = predict_ultraslow(&|_d: usize| 0.01, 100, 1, &cfg).unwrap();
        assert!(weak.warnings.iter().any(|w| matches!(w, Warning::LogRhoBelowWindow { .. })));
    }

    #[test]
    fn delay_coefficient_positive_and_continuous() {
        let c = mutation_delay_coefficient(2, 0.5, 1.0, 2.0).unwrap();
        assert!(c > 0.0);
        let near = mutation_delay_coefficient(2, 0.5, 1.0, 1.0 + 1e-9).unwrap();
        assert!(near.abs() < 1e-6);
        assert!(mutation_delay_coefficient(2, 1.0, 0.5, 2.0).is_err());
    }
}
