//! Seeded simulation of the two tandems, one Lindley step per packet.
//!
//! State is kept as durations (previous sojourn times) rather than
//! absolute departure instants, so Ω and Δ keep full precision however
//! long the run gets.

use std::collections::VecDeque;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    classify_case, paoi_from_record, CaseLabel, PacketRecord, ServerSpec, TandemParams,
};
use crate::numerics::EmpiricalDistribution;
use crate::par::{self, Execution};

/// Run length and seed for one simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: TandemParams,
    /// Packets generated, warm-up included.
    pub n_packets: u64,
    /// Leading packets whose records are dropped.
    pub n_warmup: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(params: TandemParams, n_packets: u64, n_warmup: u64, seed: u64) -> Result<Self> {
        let c = SimConfig {
            params,
            n_packets,
            n_warmup,
            seed,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_packets <= self.n_warmup {
            return Err(Error::InvalidConfig(format!(
                "n_packets ({}) must exceed n_warmup ({})",
                self.n_packets, self.n_warmup
            )));
        }
        Ok(())
    }

    /// Records the run will emit. The very first packet has no
    /// predecessor and never yields a record.
    pub fn emitted(&self) -> u64 {
        self.n_packets.saturating_sub(self.n_warmup.max(1))
    }
}

/// ChaCha8 stream seeded from a 64-bit integer.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.sample(Open01)
    }

    pub fn exponential(&mut self, rate: f64) -> f64 {
        -self.uniform().ln() / rate
    }
}

/// Interarrival and service times for successive packets.
pub trait DrawSource {
    fn interarrival(&mut self) -> f64;
    fn service1(&mut self) -> f64;
    fn service2(&mut self) -> f64;
}

/// Draws from the model distributions: Y, then S₁, then S₂ per packet.
#[derive(Debug, Clone)]
pub struct RandomDraws {
    rng: RngStream,
    lambda: f64,
    mu1: f64,
    second: ServerSpec,
}

impl RandomDraws {
    pub fn new(params: &TandemParams, seed: u64) -> Self {
        RandomDraws {
            rng: RngStream::new(seed),
            lambda: params.lambda(),
            mu1: params.mu1(),
            second: params.second(),
        }
    }
}

impl DrawSource for RandomDraws {
    fn interarrival(&mut self) -> f64 {
        self.rng.exponential(self.lambda)
    }

    fn service1(&mut self) -> f64 {
        self.rng.exponential(self.mu1)
    }

    fn service2(&mut self) -> f64 {
        match self.second {
            ServerSpec::Deterministic(d) => d,
            ServerSpec::Exponential(mu2) => self.rng.exponential(mu2),
        }
    }
}

/// Fixed sequences, for hand-checked scenarios. Exhausted queues yield NaN.
#[derive(Debug, Clone, Default)]
pub struct ScriptedDraws {
    pub interarrivals: VecDeque<f64>,
    pub services1: VecDeque<f64>,
    pub services2: VecDeque<f64>,
}

impl ScriptedDraws {
    pub fn new(y: &[f64], s1: &[f64], s2: &[f64]) -> Self {
        ScriptedDraws {
            interarrivals: y.iter().copied().collect(),
            services1: s1.iter().copied().collect(),
            services2: s2.iter().copied().collect(),
        }
    }
}

impl DrawSource for ScriptedDraws {
    fn interarrival(&mut self) -> f64 {
        self.interarrivals.pop_front().unwrap_or(f64::NAN)
    }

    fn service1(&mut self) -> f64 {
        self.services1.pop_front().unwrap_or(f64::NAN)
    }

    fn service2(&mut self) -> f64 {
        self.services2.pop_front().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, Copy)]
struct Previous {
    g: f64,
    t1: f64,
    t2: f64,
}

/// Streams [`PacketRecord`]s for packets after the warm-up.
#[derive(Debug, Clone)]
pub struct TandemSimulator<S> {
    draws: S,
    n_packets: u64,
    n_warmup: u64,
    next: u64,
    prev: Option<Previous>,
    stable: bool,
    done: bool,
}

impl<S: DrawSource> TandemSimulator<S> {
    pub fn with_draws(draws: S, stable: bool, n_packets: u64, n_warmup: u64) -> Self {
        TandemSimulator {
            draws,
            n_packets,
            n_warmup,
            next: 1,
            prev: None,
            stable,
            done: false,
        }
    }

    /// False when the parameters violate stability; the run still proceeds.
    pub fn is_stable(&self) -> bool {
        self.stable
    }

    fn step(&mut self) -> Result<Option<PacketRecord>> {
        let index = self.next;
        self.next += 1;
        let y = self.draws.interarrival();
        let s1 = self.draws.service1();
        let s2 = self.draws.service2();
        let Some(prev) = self.prev else {
            // first packet finds both nodes empty
            self.prev = Some(Previous {
                g: y,
                t1: s1,
                t2: s2,
            });
            return Ok(None);
        };
        let g = prev.g + y;
        let omega1 = prev.t1 - y;
        let w1 = omega1.max(0.0);
        let t1 = w1 + s1;
        let y2 = y + t1 - prev.t1;
        let omega2 = prev.t2 - y2;
        let w2 = omega2.max(0.0);
        let t2 = w2 + s2;
        let delta = paoi_from_record(y, t1, t2);
        if !g.is_finite() || !delta.is_finite() {
            return Err(Error::ClockOverflow { packets: index });
        }
        self.prev = Some(Previous { g, t1, t2 });
        Ok(Some(PacketRecord {
            index,
            g,
            y,
            s1,
            s2,
            omega1,
            omega2,
            w1,
            w2,
            t1,
            t2,
            delta,
            case: classify_case(omega1, omega2),
        }))
    }
}

impl<S: DrawSource> Iterator for TandemSimulator<S> {
    type Item = Result<PacketRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done && self.next <= self.n_packets {
            match self.step() {
                Ok(Some(r)) if r.index > self.n_warmup => return Some(Ok(r)),
                Ok(_) => continue,
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            }
        }
        None
    }
}

/// Seeded simulator for `config`. Unstable parameters are accepted and
/// reported through [`TandemSimulator::is_stable`].
pub fn simulate_tandem(config: &SimConfig) -> Result<TandemSimulator<RandomDraws>> {
    config.validate()?;
    Ok(TandemSimulator::with_draws(
        RandomDraws::new(&config.params, config.seed),
        config.params.is_stable(),
        config.n_packets,
        config.n_warmup,
    ))
}

/// Δ samples overall and split by case.
#[derive(Debug, Clone)]
pub struct CaseSplit {
    pub overall: EmpiricalDistribution,
    pub by_case: [Option<EmpiricalDistribution>; 4],
    pub counts: [usize; 4],
}

impl CaseSplit {
    pub fn total(&self) -> usize {
        self.overall.len()
    }

    pub fn case(&self, case: CaseLabel) -> Option<&EmpiricalDistribution> {
        self.by_case[case.index()].as_ref()
    }

    pub fn fraction(&self, case: CaseLabel) -> f64 {
        self.counts[case.index()] as f64 / self.total() as f64
    }
}

pub fn empirical_from_records<I>(records: I) -> Result<CaseSplit>
where
    I: IntoIterator<Item = PacketRecord>,
{
    split_stream(records.into_iter().map(Ok))
}

fn split_stream<I>(records: I) -> Result<CaseSplit>
where
    I: Iterator<Item = Result<PacketRecord>>,
{
    let mut all = Vec::new();
    let mut parts: [Vec<f64>; 4] = Default::default();
    for r in records {
        let r = r?;
        all.push(r.delta);
        parts[r.case.index()].push(r.delta);
    }
    let counts = [0, 1, 2, 3].map(|i| parts[i].len());
    let overall = EmpiricalDistribution::new(all)?;
    let by_case = parts.map(|p| EmpiricalDistribution::new(p).ok());
    Ok(CaseSplit {
        overall,
        by_case,
        counts,
    })
}

/// Run one configuration to completion.
pub fn run_split(config: &SimConfig) -> Result<CaseSplit> {
    split_stream(simulate_tandem(config)?)
}

/// Independent replications, one per config.
pub fn replicate(configs: &[SimConfig], exec: Execution) -> Vec<Result<CaseSplit>> {
    par::map_slice(exec, configs, run_split)
}

/// Waits of a standalone M/D/1 queue, `W_i = max(0, W_{i−1} + D − Y_i)`.
pub fn simulate_md1_waits(lambda: f64, d: f64, n: u64, warmup: u64, seed: u64) -> Result<Vec<f64>> {
    crate::md1::wait::check_md1(lambda, d)?;
    let mut rng = RngStream::new(seed);
    let mut w = 0.0f64;
    let mut out = Vec::with_capacity(n as usize);
    for i in 0..warmup + n {
        if i > 0 {
            w = (w + d - rng.exponential(lambda)).max(0.0);
        }
        if i >= warmup {
            out.push(w);
        }
    }
    Ok(out)
}
