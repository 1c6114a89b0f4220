//! Seeded random deployments and the four experiment sweeps.
//!
//! Generator contract (needed to reproduce a deployment elsewhere):
//!
//! * PRNG is ChaCha8 (`rand_chacha`), seeded with `seed_from_u64(seed)`.
//! * A unit real is `(next_u64() >> 11) * 2^-53`, scaled by the area side.
//! * Draw order: reader 0 x, reader 0 y, reader 1 x, ... then the same for
//!   tags, then the execution order.
//! * The order is a Fisher–Yates shuffle of `0..NR`, i from NR-1 down to 1,
//!   swapping i with `j = (next_u64() * (i + 1)) >> 64`.
//! * The seed of trial `t` at sweep point `p` is the first `next_u64()` of a
//!   ChaCha8 seeded with the master seed, on stream
//!   `(setup_code << 56) | (p << 28) | t`.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::netfile::format_real;
use crate::network::{ExecutionOrder, ReaderSpec, RfidNetwork, TagSpec};

pub const PRNG_NAME: &str = "chacha8";
pub const DEFAULT_AREA_SIDE: f64 = 10_000.0;
pub const DEFAULT_RADIUS: f64 = 500.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("reader count must be positive")]
    NoReaders,
    #[error("tag count must be positive")]
    NoTags,
    #[error("{0} must be a positive finite number")]
    BadLength(&'static str),
    #[error("unknown setup {0:?} (expected I, II, III or IV)")]
    UnknownSetup(String),
    #[error("trials per point must be positive")]
    NoTrials,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub area_side: f64,
    pub reader_count: usize,
    pub tag_count: usize,
    pub radius: f64,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn new(reader_count: usize, tag_count: usize, radius: f64, seed: u64) -> Self {
        Self {
            area_side: DEFAULT_AREA_SIDE,
            reader_count,
            tag_count,
            radius,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.reader_count == 0 {
            return Err(ScenarioError::NoReaders);
        }
        if self.tag_count == 0 {
            return Err(ScenarioError::NoTags);
        }
        if !(self.area_side.is_finite() && self.area_side > 0.0) {
            return Err(ScenarioError::BadLength("area side"));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(ScenarioError::BadLength("radius"));
        }
        Ok(())
    }

    /// The `config ...` comment echoed into generated network files.
    pub fn echo(&self) -> String {
        format!(
            "config NR={} NT={} Rad={} area={} seed={} prng={PRNG_NAME}",
            self.reader_count,
            self.tag_count,
            format_real(self.radius),
            format_real(self.area_side),
            self.seed
        )
    }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn bounded(rng: &mut ChaCha8Rng, n: usize) -> usize {
    ((rng.next_u64() as u128 * n as u128) >> 64) as usize
}

fn place(config: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<RfidNetwork, ScenarioError> {
    config.validate()?;
    let side = config.area_side;
    let readers = (0..config.reader_count)
        .map(|id| {
            let x = unit(rng) * side;
            let y = unit(rng) * side;
            ReaderSpec::placed(id, x, y, config.radius)
        })
        .collect();
    let tags = (0..config.tag_count)
        .map(|id| {
            let x = unit(rng) * side;
            let y = unit(rng) * side;
            TagSpec::placed(id, x, y)
        })
        .collect();
    Ok(RfidNetwork::build_geometric(readers, tags).expect("generated input is valid"))
}

/// Uniform i.i.d. deployment over `[0, area_side]²`.
pub fn generate(config: &ScenarioConfig) -> Result<RfidNetwork, ScenarioError> {
    place(config, &mut ChaCha8Rng::seed_from_u64(config.seed))
}

/// A deployment plus one execution order drawn from the same stream after
/// the placements.
pub fn generate_trial(config: &ScenarioConfig) -> Result<(RfidNetwork, ExecutionOrder), ScenarioError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let net = place(config, &mut rng)?;
    let order = shuffled_order(&mut rng, config.reader_count);
    Ok((net, order))
}

/// A uniformly random execution order from a seed alone.
pub fn random_order(reader_count: usize, seed: u64) -> ExecutionOrder {
    shuffled_order(&mut ChaCha8Rng::seed_from_u64(seed), reader_count)
}

fn shuffled_order(rng: &mut ChaCha8Rng, n: usize) -> ExecutionOrder {
    let mut ids: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = bounded(rng, i + 1);
        ids.swap(i, j);
    }
    ExecutionOrder::new(ids, n).expect("shuffle is a permutation")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setup {
    I,
    II,
    III,
    IV,
}

impl Setup {
    pub const ALL: [Setup; 4] = [Setup::I, Setup::II, Setup::III, Setup::IV];

    pub fn code(self) -> u8 {
        match self {
            Setup::I => 1,
            Setup::II => 2,
            Setup::III => 3,
            Setup::IV => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Setup::I => "I",
            Setup::II => "II",
            Setup::III => "III",
            Setup::IV => "IV",
        }
    }
}

impl fmt::Display for Setup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Setup {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Setup::I),
            "II" | "2" => Ok(Setup::II),
            "III" | "3" => Ok(Setup::III),
            "IV" | "4" => Ok(Setup::IV),
            _ => Err(ScenarioError::UnknownSetup(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    TagCount,
    ReaderCount,
    Radius,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::TagCount => "NT",
            SweepParam::ReaderCount => "NR",
            SweepParam::Radius => "Rad",
        }
    }

    pub fn value_of(self, config: &ScenarioConfig) -> f64 {
        match self {
            SweepParam::TagCount => config.tag_count as f64,
            SweepParam::ReaderCount => config.reader_count as f64,
            SweepParam::Radius => config.radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub label: String,
    pub setup_code: u8,
    pub param: SweepParam,
    /// One config per sweep point; the seed field holds the master seed
    /// until [`ExperimentPlan::trial_config`] derives a per-trial one.
    pub sweep: Vec<ScenarioConfig>,
    pub trials_per_point: usize,
    pub master_seed: u64,
}

/// The sweep grids:
///
/// | setup | NR        | NT           | Rad       |
/// |-------|-----------|--------------|-----------|
/// | I     | 500       | 100..=1000   | 500       |
/// | II    | 500       | 1000..=10000 | 500       |
/// | III   | 100..=500 | 10000        | 500       |
/// | IV    | 500       | 10000        | 100..=1000|
pub fn plan(setup: Setup, trials: usize, master_seed: u64) -> Result<ExperimentPlan, ScenarioError> {
    let cfg = |nr: usize, nt: usize, rad: f64| ScenarioConfig::new(nr, nt, rad, master_seed);
    let (param, sweep): (SweepParam, Vec<ScenarioConfig>) = match setup {
        Setup::I => (
            SweepParam::TagCount,
            (1..=10).map(|k| cfg(500, 100 * k, DEFAULT_RADIUS)).collect(),
        ),
        Setup::II => (
            SweepParam::TagCount,
            (1..=10).map(|k| cfg(500, 1000 * k, DEFAULT_RADIUS)).collect(),
        ),
        Setup::III => (
            SweepParam::ReaderCount,
            (1..=5).map(|k| cfg(100 * k, 10_000, DEFAULT_RADIUS)).collect(),
        ),
        Setup::IV => (
            SweepParam::Radius,
            (1..=10).map(|k| cfg(500, 10_000, 100.0 * k as f64)).collect(),
        ),
    };
    ExperimentPlan::custom(setup.label(), setup.code(), param, sweep, trials, master_seed)
}

impl ExperimentPlan {
    pub fn custom(
        label: &str,
        setup_code: u8,
        param: SweepParam,
        sweep: Vec<ScenarioConfig>,
        trials: usize,
        master_seed: u64,
    ) -> Result<Self, ScenarioError> {
        if trials == 0 {
            return Err(ScenarioError::NoTrials);
        }
        for c in &sweep {
            c.validate()?;
        }
        let sweep = sweep
            .into_iter()
            .map(|c| ScenarioConfig {
                seed: master_seed,
                ..c
            })
            .collect();
        Ok(Self {
            label: label.to_string(),
            setup_code,
            param,
            sweep,
            trials_per_point: trials,
            master_seed,
        })
    }

    pub fn trial_seed(&self, point: usize, trial: usize) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        let stream = (u64::from(self.setup_code) << 56) | ((point as u64) << 28) | trial as u64;
        rng.set_stream(stream);
        rng.next_u64()
    }

    pub fn trial_config(&self, point: usize, trial: usize) -> ScenarioConfig {
        ScenarioConfig {
            seed: self.trial_seed(point, trial),
            ..self.sweep[point]
        }
    }

    pub fn param_value(&self, point: usize) -> f64 {
        self.param.value_of(&self.sweep[point])
    }
}
