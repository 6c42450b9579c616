//! Oracle-versus-formula cross-checks run by `fso-sim validate`.

use std::fmt;

use fso_core::engine::{average_ber, EngineError, RunningStats, Scenario, SweepAxis};
use fso_core::oracle::{simulate_frames, simulate_frames_parallel};
use fso_core::schemes::cond_ber_at;
use fso_core::{ChannelDraw, Fading, Radiometry, RngStream, Scheme};

use crate::config::RunConfig;
use crate::CliError;

/// Conditional BER of a scheme at a receiver for a fixed draw. The validator
/// takes this as a parameter so tests can feed it a deliberately wrong one.
pub type Formula = dyn Fn(Scheme, &Radiometry, &ChannelDraw, usize) -> f64 + Sync;

/// The library's closed-form conditional BER.
pub fn core_formula(scheme: Scheme, rad: &Radiometry, draw: &ChannelDraw, rx: usize) -> f64 {
    cond_ber_at(scheme, rad, draw, rx).get()
}

// Stream indices reserved for the validator, far from the engine's chunks.
const DRAW_STREAM: u64 = u64::MAX;
const AVERAGE_STREAM_BASE: u64 = 1 << 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Waveform BER at one fixed draw against the conditional formula.
    Conditional { detector: usize },
    /// Engine average against waveform BER over freshly sampled draws.
    Average,
    /// Engine average against the formula when the channel is deterministic.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub axis: SweepAxis,
    pub point: f64,
    pub scheme: Scheme,
    pub kind: CheckKind,
    pub measured: f64,
    pub expected: f64,
    pub gap: f64,
    /// Allowed gap (3 standard errors; zero for the degenerate check).
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.gap <= self.tolerance
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            CheckKind::Conditional { detector } => format!("conditional[det{detector}]"),
            CheckKind::Average => "average".into(),
            CheckKind::Degenerate => "degenerate".into(),
        };
        write!(
            f,
            "{} {}={} {} {}: measured={:.6e} expected={:.6e} gap={:.3e} limit={:.3e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.axis,
            self.point,
            self.scheme,
            kind,
            self.measured,
            self.expected,
            self.gap,
            self.tolerance
        )
    }
}

/// First, middle and last grid values (fewer if the grid is shorter).
fn check_points(grid: &[f64]) -> Vec<f64> {
    let mut idx = vec![0, grid.len() / 2, grid.len() - 1];
    idx.dedup();
    idx.into_iter().map(|i| grid[i]).collect()
}

fn is_degenerate(s: &Scenario) -> bool {
    matches!(s.fading, Fading::Unit) && s.pointing.sigma_x == 0.0 && s.pointing.sigma_y == 0.0
}

/// Bits simulated per channel draw in the averaged check. Short frames give
/// many draws, which the heavy fading tail needs.
const BITS_PER_DRAW: u64 = 64;

/// Waveform BER at detector 0 averaged over channel draws, one draw per frame.
fn oracle_average(scheme: Scheme, scenario: &Scenario, bits: u64, seed: u64) -> Result<(f64, f64), CliError> {
    let sampler = scenario.sampler().map_err(EngineError::from)?;
    let per_frame = BITS_PER_DRAW;
    let frames = bits.div_ceil(per_frame).max(2);
    let mut stats = RunningStats::default();
    for f in 0..frames {
        let mut draw_rng = RngStream::new(seed, AVERAGE_STREAM_BASE + 2 * f);
        let mut bit_rng = RngStream::new(seed, AVERAGE_STREAM_BASE + 2 * f + 1);
        let draw = sampler.draw(&mut draw_rng);
        let out = simulate_frames(scheme, &draw, &scenario.radiometry, per_frame, &mut bit_rng);
        stats.push(out.ber(0));
    }
    Ok((stats.mean(), stats.stderr()))
}

/// Runs the cross-check suite at three grid points of `cfg`'s sweep.
pub fn cross_check(cfg: &RunConfig, formula: &Formula) -> Result<Vec<CheckResult>, CliError> {
    cfg.validate()?;
    let base = cfg.resolved_scenario();
    let seed = cfg.mc.master_seed;
    let bits = cfg.validate_bits;
    let mut results = Vec::new();
    for point in check_points(&cfg.grid) {
        let scenario = cfg.axis.apply(&base, point);
        let rad = scenario.radiometry;
        let sampler = scenario.sampler().map_err(EngineError::from)?;
        let draw = sampler.draw(&mut RngStream::new(seed, DRAW_STREAM));
        for &scheme in &cfg.schemes {
            let outcome = simulate_frames_parallel(scheme, &draw, &rad, bits, seed);
            for detector in 0..outcome.errors.len() {
                let expected = formula(scheme, &rad, &draw, detector);
                let measured = outcome.ber(detector);
                // Binomial spread under the formula's own error rate.
                let p = expected.clamp(0.0, 1.0);
                let sigma = (p * (1.0 - p) / outcome.bits as f64).sqrt();
                results.push(CheckResult {
                    axis: cfg.axis,
                    point,
                    scheme,
                    kind: CheckKind::Conditional { detector },
                    measured,
                    expected,
                    gap: (measured - expected).abs(),
                    tolerance: 3.0 * sigma,
                });
            }

            let engine = average_ber(scheme, &scenario, &cfg.mc)?;
            if is_degenerate(&scenario) {
                let expected = formula(scheme, &rad, &draw, 0);
                results.push(CheckResult {
                    axis: cfg.axis,
                    point,
                    scheme,
                    kind: CheckKind::Degenerate,
                    measured: engine.mean.get(),
                    expected,
                    gap: (engine.mean.get() - expected).abs(),
                    tolerance: 0.0,
                });
            } else {
                let (oracle_mean, frame_se) = oracle_average(scheme, &scenario, bits, seed)?;
                // Frames with no errors give no spread; floor at the binomial error.
                let p = engine.mean.get();
                let oracle_se = frame_se.max((p * (1.0 - p) / bits as f64).sqrt());
                let combined = (engine.stderr.powi(2) + oracle_se.powi(2)).sqrt();
                results.push(CheckResult {
                    axis: cfg.axis,
                    point,
                    scheme,
                    kind: CheckKind::Average,
                    measured: oracle_mean,
                    expected: engine.mean.get(),
                    gap: (oracle_mean - engine.mean.get()).abs(),
                    tolerance: 3.0 * combined,
                });
            }
        }
    }
    Ok(results)
}
