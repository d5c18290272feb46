//! Full-genotype engine. Genotypes are stored as base-`b` integers, coordinate
//! `i` being digit `i`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::{CensoringReason, FptSample, SimConfig, TargetObservation};
use crate::error::{Error, Result};
use crate::hypercube::Genotype;

struct Cloud {
    particles: Vec<u64>,
    pow: Vec<u64>,
    b: u64,
    branch_p: f64,
    mutation_scale: f64,
    slots: u64,
    total_rate: f64,
    peak: u64,
}

enum Event {
    Branch,
    /// Genotype of the mutated particle before and after.
    Mutated(u64, u64),
}

impl Cloud {
    fn new(cfg: &SimConfig, start: u64) -> Self {
        let p = &cfg.params;
        let b = u64::from(p.b);
        let pow: Vec<u64> = (0..p.d).map(|i| b.pow(i as u32)).collect();
        let total_rate = p.lambda1 + p.lambda2;
        let branch_p = p.lambda1 / total_rate;
        let slots = (b - 1) * p.d as u64;
        Self {
            particles: vec![start],
            pow,
            b,
            branch_p,
            mutation_scale: slots as f64 / (1.0 - branch_p),
            slots,
            total_rate,
            peak: 1,
        }
    }

    fn n(&self) -> u64 {
        self.particles.len() as u64
    }

    fn wait<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e: f64 = Exp1.sample(rng);
        e / (self.n() as f64 * self.total_rate)
    }

    /// Applies one event. `None` when a branch would exceed `cap`.
    fn step<R: Rng + ?Sized>(&mut self, rng: &mut R, cap: u64) -> Option<Event> {
        let idx = rng.random_range(0..self.particles.len());
        let u: f64 = rng.random();
        if u < self.branch_p {
            if self.n() >= cap {
                return None;
            }
            self.particles.push(self.particles[idx]);
            self.peak = self.peak.max(self.n());
            return Some(Event::Branch);
        }
        let slot = (((u - self.branch_p) * self.mutation_scale) as u64).min(self.slots - 1);
        let coord = (slot / (self.b - 1)) as usize;
        let shift = slot % (self.b - 1) + 1;
        let g = self.particles[idx];
        let w = self.pow[coord];
        let digit = (g / w) % self.b;
        let next = g - digit * w + ((digit + shift) % self.b) * w;
        self.particles[idx] = next;
        Some(Event::Mutated(g, next))
    }
}

fn encode(g: &Genotype, b: u32) -> Result<u64> {
    g.to_index(b)
        .ok_or_else(|| Error::Config(format!("genotype of length {} does not fit a u64 index", g.len())))
}

fn check_genotype(cfg: &SimConfig, g: &Genotype) -> Result<()> {
    if g.len() != cfg.params.d {
        return Err(Error::Dimension { expected: cfg.params.d, actual: g.len() });
    }
    if g.symbols().iter().any(|&s| u32::from(s) >= cfg.params.b) {
        return Err(Error::domain(format!("genotype {g} has a symbol outside [0, {})", cfg.params.b)));
    }
    Ok(())
}

/// First passage to `target` from the vertex obtained by shifting the first
/// `cfg.m` symbols of `target` by one.
pub fn simulate_fpt_full<R: Rng + ?Sized>(cfg: &SimConfig, target: &Genotype, rng: &mut R) -> Result<FptSample> {
    check_genotype(cfg, target)?;
    let b = cfg.params.b;
    let symbols = target
        .symbols()
        .iter()
        .enumerate()
        .map(|(i, &s)| if i < cfg.m { ((u32::from(s) + 1) % b) as u8 } else { s })
        .collect();
    let start = Genotype::new(symbols, b)?;
    simulate_fpt_full_from(cfg, &start, target, rng)
}

/// First passage from `start` to `target`, tracking every genotype.
pub fn simulate_fpt_full_from<R: Rng + ?Sized>(
    cfg: &SimConfig,
    start: &Genotype,
    target: &Genotype,
    rng: &mut R,
) -> Result<FptSample> {
    cfg.validate()?;
    check_genotype(cfg, start)?;
    check_genotype(cfg, target)?;
    let b = cfg.params.b;
    let (start, target) = (encode(start, b)?, encode(target, b)?);
    if start == target {
        return Ok(FptSample::hit(0.0, 0, 1));
    }
    let mut cloud = Cloud::new(cfg, start);
    let mut t = 0.0;
    let mut events = 0u64;
    loop {
        t += cloud.wait(rng);
        if t > cfg.t_max {
            return Ok(FptSample::censored(CensoringReason::TimeHorizon, events, cloud.peak));
        }
        events += 1;
        match cloud.step(rng, cfg.population_cap) {
            None => return Ok(FptSample::censored(CensoringReason::PopulationCap, events, cloud.peak)),
            Some(Event::Mutated(_, g)) if g == target => return Ok(FptSample::hit(t, events, cloud.peak)),
            Some(_) => {}
        }
    }
}

/// First time every vertex has been visited, starting from the origin.
pub fn simulate_cover_time<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<FptSample> {
    let mut cfg = cfg.clone();
    cfg.mode = super::SimMode::FullGenotype;
    cfg.observable = super::Observable::CoverTime;
    cfg.validate()?;
    let total = cfg.params.vertex_count().expect("validated");
    let mut visited = vec![0u64; total.div_ceil(64) as usize];
    visited[0] = 1;
    let mut seen = 1u64;
    if seen == total {
        return Ok(FptSample::hit(0.0, 0, 1));
    }
    let mut cloud = Cloud::new(&cfg, 0);
    let mut t = 0.0;
    let mut events = 0u64;
    loop {
        t += cloud.wait(rng);
        if t > cfg.t_max {
            return Ok(FptSample::censored(CensoringReason::TimeHorizon, events, cloud.peak));
        }
        events += 1;
        match cloud.step(rng, cfg.population_cap) {
            None => return Ok(FptSample::censored(CensoringReason::PopulationCap, events, cloud.peak)),
            Some(Event::Mutated(_, g)) => {
                let (word, bit) = ((g / 64) as usize, g % 64);
                if visited[word] >> bit & 1 == 0 {
                    visited[word] |= 1 << bit;
                    seen += 1;
                    if seen == total {
                        return Ok(FptSample::hit(t, events, cloud.peak));
                    }
                }
            }
            Some(Event::Branch) => {}
        }
    }
}

pub(super) fn observe<R: Rng + ?Sized>(cfg: &SimConfig, horizon: f64, rng: &mut R) -> Option<TargetObservation> {
    // start at distance m from the origin, which is the target
    let b = u64::from(cfg.params.b);
    let start: u64 = (0..cfg.m).map(|i| b.pow(i as u32)).sum();
    let mut cloud = Cloud::new(cfg, start);
    let mut at_target = u64::from(start == 0);
    let mut t = 0.0;
    let mut occupation = 0.0;
    loop {
        let next = t + cloud.wait(rng);
        if next > horizon {
            occupation += at_target as f64 * (horizon - t);
            return Some(TargetObservation { at_target, occupation_time: occupation, population: cloud.n() });
        }
        occupation += at_target as f64 * (next - t);
        t = next;
        match cloud.step(rng, cfg.population_cap) {
            None => return None,
            Some(Event::Branch) => {
                if *cloud.particles.last().expect("nonempty") == 0 {
                    at_target += 1;
                }
            }
            Some(Event::Mutated(old, new)) => {
                if new == 0 {
                    at_target += 1;
                } else if old == 0 {
                    at_target -= 1;
                }
            }
        }
    }
}
