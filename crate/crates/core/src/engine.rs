//! Semi-analytic Monte Carlo averaging over fading and pointing jitter.
//!
//! Samples are split into fixed-size chunks. Chunk `k` always covers the same
//! sample range and draws from `RngStream::new(master_seed, k)`, and chunk
//! statistics are merged in chunk order, so an estimate depends only on
//! `(master_seed, samples)` and never on the worker count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{ChannelDraw, ChannelSampler, Fading, LinkGeometry, PointingParams};
use crate::schemes::{cond_ber, outage_indicator, outage_threshold, Radiometry, Scheme, TargetOutOfRange};
use crate::specfun::{Probability, RngStream};
use crate::ParamError;

/// Samples per chunk (and per random substream).
pub const CHUNK_SIZE: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Target(#[from] TargetOutOfRange),
    #[error("grid must be nonempty")]
    EmptyGrid,
    #[error("failed to start worker pool: {0}")]
    Pool(String),
}

/// Full parameter set of one link configuration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Scenario {
    pub geometry: LinkGeometry,
    pub fading: Fading,
    pub pointing: PointingParams,
    pub radiometry: Radiometry,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ParamError> {
        self.geometry.validate()?;
        self.fading.validate()?;
        self.pointing.validate()?;
        self.radiometry.validate()
    }

    pub fn sampler(&self) -> Result<ChannelSampler, ParamError> {
        self.radiometry.validate()?;
        ChannelSampler::new(&self.geometry, &self.fading, &self.pointing)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub samples: u64,
    pub master_seed: u64,
    pub workers: usize,
    /// Stop early once `stderr / mean` of the primary statistic drops to
    /// this value. Checked only after 1, 2, 4, ... chunks.
    pub target_rel_stderr: Option<f64>,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 100_000,
            master_seed: McConfig::DEFAULT_SEED,
            workers: 1,
            target_rel_stderr: None,
        }
    }
}

impl McConfig {
    pub const DEFAULT_SEED: u64 = 0x05EE_DF50_2018;

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.samples == 0 {
            return Err(ParamError::new("mc.samples", 0.0, "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(ParamError::new("mc.workers", 0.0, "must be at least 1"));
        }
        if let Some(t) = self.target_rel_stderr {
            if !(t > 0.0 && t.is_finite()) {
                return Err(ParamError::new("mc.target_rel_stderr", t, "must be positive and finite"));
            }
        }
        Ok(())
    }
}

/// Streaming mean/variance accumulator (Welford, merged with Chan's rule).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.n as f64, other.n as f64);
        self.mean += delta * nb / n as f64;
        self.m2 += other.m2 + delta * delta * na * nb / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Standard error of the mean, `s / sqrt(n)` with the unbiased `s`.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let var = (self.m2 / (self.n - 1) as f64).max(0.0);
        (var / self.n as f64).sqrt()
    }
}

/// Mean and standard error of one estimated quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatSummary {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl From<&RunningStats> for StatSummary {
    fn from(s: &RunningStats) -> Self {
        StatSummary {
            mean: s.mean(),
            stderr: s.stderr(),
            samples: s.count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub mean: Probability,
    pub stderr: f64,
    pub samples_used: u64,
    pub scheme: Scheme,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub prob: Probability,
    pub stderr: f64,
    pub samples_used: u64,
    pub scheme: Scheme,
    pub target: Probability,
}

/// How the outage event is decided for each channel draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutageMethod {
    /// Gain-threshold form: e.g. `g11 h11 - g21 h21 < A_th`.
    #[default]
    Threshold,
    /// Direct definition: conditional BER exceeds the target.
    Direct,
}

fn run_chunk<F>(sampler: &ChannelSampler, seed: u64, chunk: u64, len: u64, n_stats: usize, kernel: &F) -> Vec<RunningStats>
where
    F: Fn(&ChannelDraw, &mut [f64]),
{
    let mut rng = RngStream::new(seed, chunk);
    let mut stats = vec![RunningStats::default(); n_stats];
    let mut values = vec![0.0; n_stats];
    for _ in 0..len {
        let draw = sampler.draw(&mut rng);
        kernel(&draw, &mut values);
        for (s, &v) in stats.iter_mut().zip(&values) {
            s.push(v);
        }
    }
    stats
}

fn chunk_range<F>(
    pool: Option<&rayon::ThreadPool>,
    sampler: &ChannelSampler,
    cfg: &McConfig,
    chunks: std::ops::Range<u64>,
    n_stats: usize,
    kernel: &F,
) -> Vec<Vec<RunningStats>>
where
    F: Fn(&ChannelDraw, &mut [f64]) + Sync,
{
    let len_of = |c: u64| (cfg.samples - c * CHUNK_SIZE).min(CHUNK_SIZE);
    match pool {
        Some(pool) => pool.install(|| {
            chunks
                .into_par_iter()
                .map(|c| run_chunk(sampler, cfg.master_seed, c, len_of(c), n_stats, kernel))
                .collect()
        }),
        None => chunks
            .map(|c| run_chunk(sampler, cfg.master_seed, c, len_of(c), n_stats, kernel))
            .collect(),
    }
}

/// Runs `kernel` on `cfg.samples` channel draws and returns the mean and
/// standard error of each of its `n_stats` outputs. All outputs are computed
/// from the same draws (common random numbers). Early stopping, when
/// configured, watches the relative standard error of output 0.
pub fn estimate<F>(scenario: &Scenario, cfg: &McConfig, n_stats: usize, kernel: F) -> Result<Vec<StatSummary>, EngineError>
where
    F: Fn(&ChannelDraw, &mut [f64]) + Sync,
{
    scenario.validate()?;
    cfg.validate()?;
    let sampler = scenario.sampler()?;
    let pool = if cfg.workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.workers)
                .build()
                .map_err(|e| EngineError::Pool(e.to_string()))?,
        )
    } else {
        None
    };

    let total_chunks = cfg.samples.div_ceil(CHUNK_SIZE);
    let mut totals = vec![RunningStats::default(); n_stats];
    let mut done = 0u64;
    let mut checkpoint = if cfg.target_rel_stderr.is_some() { 1 } else { total_chunks };
    while done < total_chunks {
        let end = checkpoint.min(total_chunks);
        for chunk in chunk_range(pool.as_ref(), &sampler, cfg, done..end, n_stats, &kernel) {
            for (t, s) in totals.iter_mut().zip(&chunk) {
                t.merge(s);
            }
        }
        done = end;
        if let (Some(target), Some(primary)) = (cfg.target_rel_stderr, totals.first()) {
            if primary.mean() > 0.0 && primary.stderr() / primary.mean() <= target {
                break;
            }
        }
        checkpoint *= 2;
    }
    Ok(totals.iter().map(StatSummary::from).collect())
}

/// Average BER of each scheme over the same channel draws.
pub fn average_ber_many(schemes: &[Scheme], scenario: &Scenario, cfg: &McConfig) -> Result<Vec<BerEstimate>, EngineError> {
    let rad = scenario.radiometry;
    let stats = estimate(scenario, cfg, schemes.len(), |draw, out| {
        for (o, &s) in out.iter_mut().zip(schemes) {
            *o = cond_ber(s, &rad, draw).get();
        }
    })?;
    Ok(stats
        .iter()
        .zip(schemes)
        .map(|(s, &scheme)| BerEstimate {
            mean: Probability::from_bounded(s.mean.clamp(0.0, 0.5)),
            stderr: s.stderr,
            samples_used: s.samples,
            scheme,
        })
        .collect())
}

pub fn average_ber(scheme: Scheme, scenario: &Scenario, cfg: &McConfig) -> Result<BerEstimate, EngineError> {
    Ok(average_ber_many(&[scheme], scenario, cfg)?[0])
}

/// Paired estimate of `BER(first) - BER(second)` on common draws.
pub fn paired_difference(first: Scheme, second: Scheme, scenario: &Scenario, cfg: &McConfig) -> Result<StatSummary, EngineError> {
    let rad = scenario.radiometry;
    let stats = estimate(scenario, cfg, 1, |draw, out| {
        out[0] = cond_ber(first, &rad, draw).get() - cond_ber(second, &rad, draw).get();
    })?;
    Ok(stats[0])
}

/// Outage probability for a target BER.
pub fn outage_probability(
    scheme: Scheme,
    scenario: &Scenario,
    target: Probability,
    cfg: &McConfig,
    method: OutageMethod,
) -> Result<OutageEstimate, EngineError> {
    let rad = scenario.radiometry;
    let threshold = outage_threshold(scheme, &rad, target)?;
    let stats = estimate(scenario, cfg, 1, |draw, out| {
        let hit = match method {
            OutageMethod::Threshold => outage_indicator(scheme, draw, threshold),
            OutageMethod::Direct => cond_ber(scheme, &rad, draw) > target,
        };
        out[0] = if hit { 1.0 } else { 0.0 };
    })?;
    let s = stats[0];
    let p = s.mean.clamp(0.0, 1.0);
    Ok(OutageEstimate {
        prob: Probability::from_bounded(p),
        stderr: (p * (1.0 - p) / s.samples as f64).sqrt(),
        samples_used: s.samples,
        scheme,
        target,
    })
}

/// Parameter swept along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    SnrDb,
    /// Receiver separation `d`.
    Separation,
    /// Beam waist `w_z`.
    BeamWaist,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::SnrDb => "snr_db",
            SweepAxis::Separation => "d",
            SweepAxis::BeamWaist => "w_z",
        }
    }

    /// Copy of `scenario` with this axis set to `value`.
    pub fn apply(self, scenario: &Scenario, value: f64) -> Scenario {
        let mut s = *scenario;
        match self {
            SweepAxis::SnrDb => s.radiometry = s.radiometry.with_snr_db(value),
            SweepAxis::Separation => s.geometry.receiver_separation = value,
            SweepAxis::BeamWaist => s.geometry.beam_waist = value,
        }
        s
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "snr_db" | "snr" => Ok(SweepAxis::SnrDb),
            "d" | "separation" => Ok(SweepAxis::Separation),
            "w_z" | "beam_waist" => Ok(SweepAxis::BeamWaist),
            other => Err(format!("unknown sweep axis {other:?} (expected snr_db, d or w_z)")),
        }
    }
}

/// What a sweep estimates at each grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepMetric {
    Ber,
    Outage { target: Probability, method: OutageMethod },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub axis_value: f64,
    pub scheme: Scheme,
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Evaluates every scheme at every grid point. All schemes at a grid point
/// share draws, and every grid point reuses the same seed, so differences
/// between schemes and between neighbouring grid points are paired.
pub fn sweep(
    axis: SweepAxis,
    grid: &[f64],
    scenario: &Scenario,
    schemes: &[Scheme],
    metric: SweepMetric,
    cfg: &McConfig,
) -> Result<Vec<SweepRow>, EngineError> {
    if grid.is_empty() {
        return Err(EngineError::EmptyGrid);
    }
    let mut rows = Vec::with_capacity(grid.len() * schemes.len());
    for &value in grid {
        let point = axis.apply(scenario, value);
        let row = |scheme, mean, stderr, samples| SweepRow {
            axis,
            axis_value: value,
            scheme,
            mean,
            stderr,
            samples,
        };
        match metric {
            SweepMetric::Ber => {
                for e in average_ber_many(schemes, &point, cfg)? {
                    rows.push(row(e.scheme, e.mean.get(), e.stderr, e.samples_used));
                }
            }
            SweepMetric::Outage { target, method } => {
                let rad = point.radiometry;
                let thresholds = schemes
                    .iter()
                    .map(|&s| outage_threshold(s, &rad, target))
                    .collect::<Result<Vec<_>, _>>()?;
                let stats = estimate(&point, cfg, schemes.len(), |draw, out| {
                    for ((o, &s), &th) in out.iter_mut().zip(schemes).zip(&thresholds) {
                        let hit = match method {
                            OutageMethod::Threshold => outage_indicator(s, draw, th),
                            OutageMethod::Direct => cond_ber(s, &rad, draw) > target,
                        };
                        *o = if hit { 1.0 } else { 0.0 };
                    }
                })?;
                for (s, &scheme) in stats.iter().zip(schemes) {
                    let p = s.mean.clamp(0.0, 1.0);
                    rows.push(row(scheme, p, (p * (1.0 - p) / s.samples as f64).sqrt(), s.samples));
                }
            }
        }
    }
    Ok(rows)
}
