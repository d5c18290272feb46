//! Event-driven Monte Carlo simulation of the branching random walk.
//!
//! Every particle branches at rate `lambda1` and mutates at rate `lambda2`.
//! The engines draw the next event time from the aggregate rate
//! `N (lambda1 + lambda2)`, pick a particle uniformly and then the event type.
//! Times are in the original units of [`ModelParams`].

mod barrier;
mod full;
mod levels;
mod projected;

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use barrier::survived_barrier;
pub use full::{simulate_cover_time, simulate_fpt_full, simulate_fpt_full_from};
pub use projected::simulate_fpt_projected;

use crate::error::{Error, Result};
use crate::hypercube::{Genotype, ModelParams};
use crate::numerics::{predict_fast, predict_slow, solve_first_moment, SolverConfig};

/// Default population cap.
pub const DEFAULT_POPULATION_CAP: u64 = 10_000_000;

/// Largest `b^d` for which cover times are tracked.
pub const COVER_VERTEX_LIMIT: u64 = 1 << 26;

/// Generator used for every replica stream.
pub const RNG_NAME: &str = "Xoshiro256PlusPlus (rand_xoshiro 0.7)";

/// How replica seeds are derived from the master seed.
pub const SEED_RULE: &str = "seed_i = splitmix64(master_seed + splitmix64(i)); Xoshiro256PlusPlus::seed_from_u64(seed_i)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimMode {
    /// Counts per distance to the target; any `d`.
    Projected,
    /// Every particle carries its genotype; needs `b^d < 2^64`.
    FullGenotype,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    /// First time a particle started at distance `m` reaches the target.
    FirstPassage,
    /// First time every vertex has been visited (full-genotype mode only).
    CoverTime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ModelParams,
    /// Start distance from the target.
    pub m: usize,
    /// Time horizon in original units.
    pub t_max: f64,
    pub population_cap: u64,
    pub master_seed: u64,
    pub replicas: usize,
    pub mode: SimMode,
    pub observable: Observable,
}

impl SimConfig {
    /// Projected first-passage configuration with the default horizon
    /// (4 times the regime prediction), cap, one replica and seed 0.
    pub fn new(params: ModelParams, m: usize) -> Result<Self> {
        if m > params.d {
            return Err(Error::Config(format!("start distance m = {m} exceeds d = {}", params.d)));
        }
        Ok(Self {
            params,
            m,
            t_max: default_horizon(&params, m),
            population_cap: DEFAULT_POPULATION_CAP,
            master_seed: 0,
            replicas: 1,
            mode: SimMode::Projected,
            observable: Observable::FirstPassage,
        })
    }

    /// Full-genotype cover-time configuration. The horizon defaults to 4
    /// times the first-passage prediction to the antipode.
    pub fn cover(params: ModelParams) -> Result<Self> {
        let mut cfg = Self::new(params, params.d)?;
        cfg.mode = SimMode::FullGenotype;
        cfg.observable = Observable::CoverTime;
        Ok(cfg)
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_population_cap(mut self, cap: u64) -> Self {
        self.population_cap = cap;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_replicas(mut self, replicas: usize) -> Self {
        self.replicas = replicas;
        self
    }

    pub fn with_mode(mut self, mode: SimMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0) {
            return Err(Error::Config(format!("t_max = {} must be > 0", self.t_max)));
        }
        if self.population_cap < 1 {
            return Err(Error::Config("population_cap must be >= 1".into()));
        }
        if self.replicas < 1 {
            return Err(Error::Config("replicas must be >= 1".into()));
        }
        if self.m > self.params.d {
            return Err(Error::Config(format!("start distance m = {} exceeds d = {}", self.m, self.params.d)));
        }
        let vertices = self.params.vertex_count();
        if self.mode == SimMode::FullGenotype && vertices.is_none() {
            return Err(Error::Config(format!(
                "full-genotype mode needs b^d < 2^64, got b = {}, d = {}",
                self.params.b, self.params.d
            )));
        }
        if self.observable == Observable::CoverTime {
            if self.mode != SimMode::FullGenotype {
                return Err(Error::Config("cover times need full-genotype mode".into()));
            }
            if vertices.is_none_or(|v| v > COVER_VERTEX_LIMIT) {
                return Err(Error::Config(format!(
                    "cover times need b^d <= 2^26, got b = {}, d = {}",
                    self.params.b, self.params.d
                )));
            }
        }
        Ok(())
    }
}

/// Horizon as a multiple of [`reference_time`].
pub const DEFAULT_HORIZON_MULTIPLE: f64 = 4.0;

/// `DEFAULT_HORIZON_MULTIPLE` times [`reference_time`].
pub fn default_horizon(p: &ModelParams, m: usize) -> f64 {
    DEFAULT_HORIZON_MULTIPLE * reference_time(p, m)
}

/// The regime prediction in original time units. Falls back to the
/// first-moment root, then to the time the mean population needs to reach `b^d`.
pub fn reference_time(p: &ModelParams, m: usize) -> f64 {
    let q = p.rescaled();
    let cfg = SolverConfig::default();
    let m_eff = m.max(1);
    let pred = if q.log_rho() < 1.0 {
        predict_slow(&q, m_eff, &cfg).map(|r| r.t_predicted)
    } else if q.log_rho() > 1.0 {
        predict_fast(&q, m_eff, &cfg).map(|r| r.t_predicted)
    } else {
        Err(Error::regime("critical"))
    };
    let t = pred
        .ok()
        .filter(|t| *t > 0.0)
        .or_else(|| solve_first_moment(&q, m_eff).ok())
        .unwrap_or_else(|| (q.d as f64 * f64::from(q.b).ln() / q.log_rho()).max(1.0));
    p.to_raw_time(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CensoringReason {
    None,
    TimeHorizon,
    PopulationCap,
}

impl CensoringReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            CensoringReason::None => "none",
            CensoringReason::TimeHorizon => "time_horizon",
            CensoringReason::PopulationCap => "population_cap",
        }
    }
}

/// Outcome of one replica.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FptSample {
    /// Present exactly when `censoring` is `None`.
    pub hit_time: Option<f64>,
    pub events_processed: u64,
    pub peak_population: u64,
    pub censoring: CensoringReason,
}

impl FptSample {
    pub(crate) fn hit(t: f64, events: u64, peak: u64) -> Self {
        Self { hit_time: Some(t), events_processed: events, peak_population: peak, censoring: CensoringReason::None }
    }

    pub(crate) fn censored(reason: CensoringReason, events: u64, peak: u64) -> Self {
        Self { hit_time: None, events_processed: events, peak_population: peak, censoring: reason }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub q10: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q90: f64,
}

impl Quantiles {
    /// Linear-interpolation quantiles (Hyndman-Fan type 7) of the values.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Self {
            q10: quantile_sorted(&v, 0.10),
            q25: quantile_sorted(&v, 0.25),
            median: quantile_sorted(&v, 0.5),
            q75: quantile_sorted(&v, 0.75),
            q90: quantile_sorted(&v, 0.90),
        })
    }
}

/// Type-7 quantile of sorted, nonempty data. `+inf` entries are allowed;
/// a quantile that interpolates towards one is `+inf`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if frac == 0.0 {
        return sorted[lo];
    }
    let hi = (lo + 1).min(sorted.len() - 1);
    if sorted[hi] == f64::INFINITY {
        return f64::INFINITY;
    }
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    /// Indexed by replica.
    pub samples: Vec<FptSample>,
    /// Over all replicas, censored ones ranked above every hit. A quantile
    /// that falls among censored replicas is `+inf` (`null` in JSON).
    pub quantiles: Option<Quantiles>,
    pub censored_count: usize,
    pub master_seed: u64,
    pub rng_name: String,
    pub seed_rule: String,
}

impl EnsembleStats {
    pub fn hit_times(&self) -> Vec<f64> {
        self.samples.iter().filter_map(|s| s.hit_time).collect()
    }

    /// The median, when fewer than half of the replicas are censored.
    pub fn median(&self) -> Option<f64> {
        self.quantiles.map(|q| q.median).filter(|m| m.is_finite())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replica `index`, see [`SEED_RULE`].
pub fn replica_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(splitmix64(index)))
}

pub fn replica_rng(master_seed: u64, index: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(replica_seed(master_seed, index))
}

/// Runs replica `index` of `cfg` with its derived stream.
pub fn run_replica(cfg: &SimConfig, index: u64) -> Result<FptSample> {
    let mut rng = replica_rng(cfg.master_seed, index);
    match (cfg.observable, cfg.mode) {
        (Observable::CoverTime, _) => simulate_cover_time(cfg, &mut rng),
        (Observable::FirstPassage, SimMode::Projected) => simulate_fpt_projected(cfg, &mut rng),
        (Observable::FirstPassage, SimMode::FullGenotype) => {
            simulate_fpt_full(cfg, &Genotype::origin(cfg.params.d), &mut rng)
        }
    }
}

/// Worker count from `BRWSS_THREADS`, if set to a positive integer.
pub fn thread_override() -> Option<usize> {
    std::env::var("BRWSS_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs `work` on the global rayon pool, or on a dedicated pool when
/// `BRWSS_THREADS` is set.
pub(crate) fn in_pool<T: Send>(work: impl FnOnce() -> T + Send) -> Result<T> {
    match thread_override() {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work)),
        None => Ok(work()),
    }
}

/// Runs all replicas in parallel. The result depends only on `cfg`.
pub fn run_ensemble(cfg: &SimConfig) -> Result<EnsembleStats> {
    cfg.validate()?;
    let samples = in_pool(|| -> Result<Vec<FptSample>> {
        (0..cfg.replicas as u64).into_par_iter().map(|i| run_replica(cfg, i)).collect()
    })??;
    Ok(summarize(cfg, samples))
}

pub(crate) fn summarize(cfg: &SimConfig, samples: Vec<FptSample>) -> EnsembleStats {
    let censored_count = samples.iter().filter(|s| s.hit_time.is_none()).count();
    let times: Vec<f64> = samples.iter().map(|s| s.hit_time.unwrap_or(f64::INFINITY)).collect();
    let quantiles = Quantiles::of(&times);
    EnsembleStats {
        samples,
        quantiles,
        censored_count,
        master_seed: cfg.master_seed,
        rng_name: RNG_NAME.to_string(),
        seed_rule: SEED_RULE.to_string(),
    }
}

/// State of one replica at a fixed time, run without absorption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetObservation {
    /// Particles at the target at time `t`.
    pub at_target: u64,
    /// Integral over `[0, t]` of the number of particles at the target.
    pub occupation_time: f64,
    /// Total population at time `t`.
    pub population: u64,
}

/// Runs one replica to time `t` without absorption. `None` when the
/// population cap was reached (the replica is discarded).
pub fn observe_target<R: rand::Rng + ?Sized>(
    cfg: &SimConfig,
    t: f64,
    rng: &mut R,
) -> Result<Option<TargetObservation>> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("observation time t = {t} must be >= 0")));
    }
    cfg.validate()?;
    Ok(match cfg.mode {
        SimMode::Projected => projected::observe(cfg, t, rng),
        SimMode::FullGenotype => full::observe(cfg, t, rng),
    })
}

/// `N_0(t)`: particles at the target at time `t`. `None` when the cap was hit.
pub fn count_particles_at_target<R: rand::Rng + ?Sized>(
    cfg: &SimConfig,
    t: f64,
    rng: &mut R,
) -> Result<Option<u64>> {
    Ok(observe_target(cfg, t, rng)?.map(|o| o.at_target))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type7_quantiles() {
        let q = Quantiles::of(&[4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!(q.median, 3.0);
        assert!((q.q10 - 1.4).abs() < 1e-12);
        assert!((q.q75 - 4.0).abs() < 1e-12);
        assert!(Quantiles::of(&[]).is_none());
        let inf = f64::INFINITY;
        let q = Quantiles::of(&[inf, 2.0, 1.0, 3.0, inf]).unwrap();
        assert_eq!(q.median, 3.0);
        assert_eq!(q.q90, inf);
    }

    #[test]
    fn seeds_differ_per_replica() {
        let a = replica_seed(7, 0);
        assert_ne!(a, replica_seed(7, 1));
        assert_ne!(a, replica_seed(8, 0));
        assert_eq!(a, replica_seed(7, 0));
    }

    #[test]
    fn config_validation() {
        let p = ModelParams::from_rho(2, 30, 1.5).unwrap();
        let cfg = SimConfig::new(p, 1).unwrap();
        assert!(cfg.validate().is_ok());
        assert!(cfg.t_max > 0.0);
        assert!(cfg.clone().with_replicas(0).validate().is_err());
        assert!(cfg.clone().with_t_max(0.0).validate().is_err());
        assert!(SimConfig::cover(p).unwrap().validate().is_err());
        assert!(SimConfig::new(p, 31).is_err());
    }
}
