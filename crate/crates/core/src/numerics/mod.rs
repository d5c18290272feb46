//! First-passage-time predictors.
//!
//! All times here are in rescaled units (`lambda2 = 1`, `lambda1 = log rho`);
//! use [`ModelParams::to_raw_time`](crate::hypercube::ModelParams::to_raw_time)
//! to convert back.

mod first_moment;
mod lambert;
mod regimes;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use first_moment::{first_moment_residual, solve_first_moment, solve_first_moment_report, RootReport};
pub use lambert::lambert_w0;
pub use regimes::{
    bar_t, mutation_delay_coefficient, predict, predict_fast, predict_slow, predict_ultraslow,
    predict_ultraslow_at, regime_constants, x0, LogRhoInverseLog, LogRhoPower, RegimeConstants,
    RhoSchedule,
};

/// Tolerances and the "large enough" window constants, in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Root tolerance relative to `max(1, t)`.
    pub root_rel_tol: f64,
    /// Geometric step of the bracketing scan.
    pub scan_ratio: f64,
    pub max_iterations: usize,
    /// Slow and fast regimes: `m <= d / l1`.
    pub l1: f64,
    /// Ultra-slow regime: `log rho >= l2 / d`.
    pub l2: f64,
    /// Ultra-slow regime: `m <= d / l3`.
    pub l3: f64,
    /// Regime constants need `rho` in `[1 + guard, e - guard]`.
    pub rho_guard: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            root_rel_tol: 1e-12,
            scan_ratio: 1.25,
            max_iterations: 200,
            l1: 32.0,
            l2: 64.0,
            l3: 64.0,
            rho_guard: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `rho` in `(1, e)`: `t ~ x0 d + r m`.
    SlowConstantRho,
    /// `rho > e`: Lambert-W centering on the pre-mixing scale.
    FastConstantRho,
    /// `rho(d) -> 1`, binary alphabet: first-moment root minus a correction.
    UltraSlow,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::SlowConstantRho => "slow",
            Regime::FastConstantRho => "fast",
            Regime::UltraSlow => "ultraslow",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A hypothesis of the asymptotic results that does not hold for the requested parameters.
/// Predictions are still produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Warning {
    /// `m` exceeds the `d / L` window of the regime.
    DistanceAboveWindow { limit: f64 },
    /// Ultra-slow regime with `log rho < l2 / d`.
    LogRhoBelowWindow { limit: f64 },
    /// Ultra-slow predictor used with `log rho >= 1`; the correction has the wrong sign.
    NotUltraSlow,
    /// The first-moment residual changed sign more than once in the scan window.
    MultipleRoots { sign_changes: usize },
    /// `m = 0`: the passage time is 0 by convention.
    ZeroDistance,
}

impl Warning {
    /// Short token used in CSV output (no commas or spaces).
    pub fn code(&self) -> String {
        match self {
            Warning::DistanceAboveWindow { limit } => format!("m_above_window({limit})"),
            Warning::LogRhoBelowWindow { limit } => format!("log_rho_below_window({limit})"),
            Warning::NotUltraSlow => "log_rho_not_below_1".to_string(),
            Warning::MultipleRoots { sign_changes } => format!("multiple_roots({sign_changes})"),
            Warning::ZeroDistance => "m_zero_convention".to_string(),
        }
    }
}

/// A regime prediction of the first passage time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FptPrediction {
    pub regime: Regime,
    pub m: usize,
    /// Root of the first-moment equation, when it was computed.
    pub t_first_moment: Option<f64>,
    /// The regime's centering of the passage time.
    pub t_predicted: f64,
    /// Labelled terms summing to `t_predicted`.
    pub terms: Vec<(String, f64)>,
    pub warnings: Vec<Warning>,
}

impl FptPrediction {
    pub(crate) fn zero(regime: Regime) -> Self {
        Self {
            regime,
            m: 0,
            t_first_moment: Some(0.0),
            t_predicted: 0.0,
            terms: vec![("zero".to_string(), 0.0)],
            warnings: vec![Warning::ZeroDistance],
        }
    }

    pub fn term(&self, label: &str) -> Option<f64> {
        self.terms.iter().find(|(l, _)| l == label).map(|&(_, v)| v)
    }

    /// `t_first_moment - t_predicted`, when the root is known.
    pub fn root_gap(&self) -> Option<f64> {
        self.t_first_moment.map(|t| t - self.t_predicted)
    }
}
