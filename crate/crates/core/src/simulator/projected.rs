//! Distance-projected engine: particle counts per Hamming distance to the target.
//!
//! A mutation at distance `k` picks one of `(b-1) d` equally likely
//! (coordinate, symbol) outcomes: `k` move down, `k (b-2)` keep the distance
//! and the rest move up.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::levels::{Fenwick, LevelIndex, PrefixCounts};
use super::{CensoringReason, FptSample, SimConfig, TargetObservation};
use crate::error::Result;

/// One drawn event: a particle at `level` either branches or mutates to `to`.
struct Draw {
    level: usize,
    to: usize,
    branch: bool,
}

impl Draw {
    #[inline]
    fn is_down(&self) -> bool {
        self.to < self.level
    }
}

struct Engine<L> {
    counts: Vec<u64>,
    levels: L,
    n: u64,
    peak: u64,
    branch_p: f64,
    mutation_scale: f64,
    lateral_factor: u64,
    slots: u64,
    total_rate: f64,
}

impl<L: LevelIndex> Engine<L> {
    fn new(cfg: &SimConfig) -> Self {
        let p = &cfg.params;
        let d = p.d;
        let mut counts = vec![0; d + 1];
        let mut levels = L::new(d + 1);
        counts[cfg.m] = 1;
        levels.apply(cfg.m, cfg.m, false);
        let total_rate = p.lambda1 + p.lambda2;
        let branch_p = p.lambda1 / total_rate;
        let slots = u64::from(p.b - 1) * d as u64;
        Self {
            counts,
            levels,
            n: 1,
            peak: 1,
            branch_p,
            mutation_scale: slots as f64 / (1.0 - branch_p),
            lateral_factor: u64::from(p.b - 1),
            slots,
            total_rate,
        }
    }

    #[inline]
    fn wait<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e: f64 = Exp1.sample(rng);
        e / (self.n as f64 * self.total_rate)
    }

    // The event type is random and roughly evenly split, so branching on it
    // mispredicts constantly. Everything below is written as selects.
    #[inline]
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Draw {
        let level = self.levels.find(rng.random_range(0..self.n));
        let u: f64 = rng.random();
        let branch = u < self.branch_p;
        // negative for branches; the saturating cast maps it to 0
        let slot = (((u - self.branch_p) * self.mutation_scale) as u64).min(self.slots - 1);
        let k = level as u64;
        let down = !branch & (slot < k);
        let up = !branch & (slot >= k * self.lateral_factor);
        let to = level + usize::from(up) - usize::from(down);
        Draw { level, to, branch }
    }

    /// Removes the particle from its level unless it branched, and adds one at `to`.
    #[inline]
    fn apply(&mut self, e: &Draw) {
        self.counts[e.level] -= u64::from(!e.branch);
        self.counts[e.to] += 1;
        self.levels.apply(e.level, e.to, !e.branch);
        self.n += u64::from(e.branch);
        self.peak = self.peak.max(self.n);
    }
}

/// First passage to the target of the projected process started at distance `cfg.m`.
///
/// Distributionally exact for the full model by symmetry. Censored on the
/// time horizon or when a branching event would exceed the population cap.
pub fn simulate_fpt_projected<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<FptSample> {
    cfg.validate()?;
    if cfg.m == 0 {
        return Ok(FptSample::hit(0.0, 0, 1));
    }
    Ok(if flat_index(cfg) {
        first_passage::<PrefixCounts, R>(cfg, rng)
    } else {
        first_passage::<Fenwick, R>(cfg, rng)
    })
}

/// Genomes shorter than this use the flat prefix index.
const FLAT_INDEX_MAX_LEN: usize = 96;

fn flat_index(cfg: &SimConfig) -> bool {
    cfg.params.d < FLAT_INDEX_MAX_LEN && cfg.population_cap <= u64::from(u32::MAX)
}

fn first_passage<L: LevelIndex, R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> FptSample {
    let mut eng = Engine::<L>::new(cfg);
    let mut t = 0.0;
    let mut events = 0u64;
    loop {
        t += eng.wait(rng);
        if t > cfg.t_max {
            return FptSample::censored(CensoringReason::TimeHorizon, events, eng.peak);
        }
        events += 1;
        let e = eng.draw(rng);
        if e.branch & (eng.n >= cfg.population_cap) {
            return FptSample::censored(CensoringReason::PopulationCap, events, eng.peak);
        }
        if e.is_down() & (e.level == 1) {
            return FptSample::hit(t, events, eng.peak);
        }
        eng.apply(&e);
    }
}

pub(super) fn observe<R: Rng + ?Sized>(cfg: &SimConfig, horizon: f64, rng: &mut R) -> Option<TargetObservation> {
    if flat_index(cfg) {
        observe_with::<PrefixCounts, R>(cfg, horizon, rng)
    } else {
        observe_with::<Fenwick, R>(cfg, horizon, rng)
    }
}

fn observe_with<L: LevelIndex, R: Rng + ?Sized>(cfg: &SimConfig, horizon: f64, rng: &mut R) -> Option<TargetObservation> {
    let mut eng = Engine::<L>::new(cfg);
    let mut t = 0.0;
    let mut occupation = 0.0;
    loop {
        let next = t + eng.wait(rng);
        if next > horizon {
            occupation += eng.counts[0] as f64 * (horizon - t);
            return Some(TargetObservation { at_target: eng.counts[0], occupation_time: occupation, population: eng.n });
        }
        occupation += eng.counts[0] as f64 * (next - t);
        t = next;
        let e = eng.draw(rng);
        if e.branch & (eng.n >= cfg.population_cap) {
            return None;
        }
        eng.apply(&e);
    }
}
