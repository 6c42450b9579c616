//! Flat `key = value` run configuration.
//!
//! Keys use dotted section prefixes (`geometry.r_a = 0.10`). `#` starts a
//! comment. Later assignments override earlier ones, which is how
//! `--set key=value` overrides are applied on top of a file.

use std::path::PathBuf;

use fso_core::engine::{McConfig, OutageMethod, Scenario, SweepAxis, SweepMetric};
use fso_core::schemes::outage_threshold;
use fso_core::{Fading, Probability, Radiometry, Scheme, TurbulenceParams};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("{key}: cannot parse {value:?}: {reason}")]
    Value { key: String, value: String, reason: String },
    #[error("{0}")]
    Invalid(String),
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    /// When set, the transmit power is derived from this SNR.
    pub snr_db: Option<f64>,
    pub schemes: Vec<Scheme>,
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    /// Report outage probability instead of average BER.
    pub outage: bool,
    pub target: Probability,
    pub outage_method: OutageMethod,
    pub mc: McConfig,
    pub output: Option<PathBuf>,
    /// Bits per detector for each oracle cross-check in `validate`.
    pub validate_bits: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: Scenario::default(),
            snr_db: Some(Radiometry::DEFAULT_SNR_DB),
            schemes: Scheme::ALL.to_vec(),
            axis: SweepAxis::SnrDb,
            grid: vec![30.0, 35.0, 40.0, 45.0, 50.0],
            outage: false,
            target: Probability::new(1e-6).expect("valid probability"),
            outage_method: OutageMethod::Threshold,
            mc: McConfig::default(),
            output: None,
            validate_bits: 1_000_000,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.trim().parse::<f64>().map_err(|e| ConfigError::Value {
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

fn parse_u64(key: &str, value: &str) -> Result<u64, ConfigError> {
    let v = value.trim().replace('_', "");
    // Accept scientific notation for counts (1e6) as long as it is integral.
    v.parse::<u64>().or_else(|_| match v.parse::<f64>() {
        Ok(f) if f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 => Ok(f as u64),
        _ => Err(ConfigError::Value {
            key: key.to_string(),
            value: value.to_string(),
            reason: "expected a non-negative integer".into(),
        }),
    })
}

/// Parses `a, b, c` or an inclusive range `start:step:stop`.
pub fn parse_grid(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    let value = value.trim();
    if value.is_empty() {
        return Ok(Vec::new());
    }
    if value.contains(':') {
        let parts: Vec<&str> = value.split(':').collect();
        if parts.len() != 3 {
            return Err(ConfigError::Value {
                key: key.to_string(),
                value: value.to_string(),
                reason: "range must be start:step:stop".into(),
            });
        }
        let (start, step, stop) = (parse_f64(key, parts[0])?, parse_f64(key, parts[1])?, parse_f64(key, parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err(ConfigError::Value {
                key: key.to_string(),
                value: value.to_string(),
                reason: "range needs step > 0 and stop >= start".into(),
            });
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| round9(start + i as f64 * step)).collect());
    }
    value.split(',').map(|v| parse_f64(key, v)).collect()
}

fn round9(v: f64) -> f64 {
    (v * 1e9).round() / 1e9
}

impl RunConfig {
    /// Parses config text on top of the defaults.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: 0,
            text: assignment.to_string(),
        })?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let s = &mut self.scenario;
        match key {
            "geometry.r_a" => s.geometry.aperture_radius = parse_f64(key, value)?,
            "geometry.w_z" => s.geometry.beam_waist = parse_f64(key, value)?,
            "geometry.d" => s.geometry.receiver_separation = parse_f64(key, value)?,
            "geometry.wavelength" => s.geometry.wavelength = parse_f64(key, value)?,
            "geometry.link_length" => s.geometry.link_length = parse_f64(key, value)?,
            "turbulence.model" => {
                s.fading = match value {
                    "gamma-gamma" | "gamma_gamma" => match s.fading {
                        Fading::GammaGamma(t) => Fading::GammaGamma(t),
                        Fading::Unit => Fading::GammaGamma(TurbulenceParams::default()),
                    },
                    "none" | "unit" => Fading::Unit,
                    _ => {
                        return Err(ConfigError::Value {
                            key: key.into(),
                            value: value.into(),
                            reason: "expected gamma-gamma or none".into(),
                        })
                    }
                }
            }
            "turbulence.alpha" | "turbulence.beta" => {
                let v = parse_f64(key, value)?;
                let mut t = match s.fading {
                    Fading::GammaGamma(t) => t,
                    Fading::Unit => TurbulenceParams::default(),
                };
                if key.ends_with("alpha") {
                    t.alpha = v;
                } else {
                    t.beta = v;
                }
                if let Fading::GammaGamma(_) = s.fading {
                    s.fading = Fading::GammaGamma(t);
                }
            }
            "pointing.sigma" => {
                let v = parse_f64(key, value)?;
                s.pointing.sigma_x = v;
                s.pointing.sigma_y = v;
            }
            "pointing.sigma_x" => s.pointing.sigma_x = parse_f64(key, value)?,
            "pointing.sigma_y" => s.pointing.sigma_y = parse_f64(key, value)?,
            "radiometry.responsivity" => s.radiometry.responsivity = parse_f64(key, value)?,
            "radiometry.slot_duration" => s.radiometry.slot_duration = parse_f64(key, value)?,
            "radiometry.noise_density" => s.radiometry.noise_density = parse_f64(key, value)?,
            "radiometry.transmit_power" => {
                s.radiometry.transmit_power = parse_f64(key, value)?;
                self.snr_db = None;
            }
            "radiometry.snr_db" => self.snr_db = Some(parse_f64(key, value)?),
            "run.schemes" => {
                self.schemes = value
                    .split(',')
                    .filter(|v| !v.trim().is_empty())
                    .map(|v| {
                        v.parse::<Scheme>().map_err(|e| ConfigError::Value {
                            key: key.into(),
                            value: value.into(),
                            reason: e.to_string(),
                        })
                    })
                    .collect::<Result<_, _>>()?
            }
            "run.metric" | "run.target" | "run.outage_method" => self.set_metric(key, value)?,
            "sweep.axis" => {
                self.axis = value.parse().map_err(|reason| ConfigError::Value {
                    key: key.into(),
                    value: value.into(),
                    reason,
                })?
            }
            "sweep.grid" => self.grid = parse_grid(key, value)?,
            "mc.samples" => self.mc.samples = parse_u64(key, value)?,
            "mc.seed" => self.mc.master_seed = parse_u64(key, value)?,
            "mc.workers" => self.mc.workers = parse_u64(key, value)? as usize,
            "mc.target_rel_stderr" => {
                self.mc.target_rel_stderr = match value {
                    "" | "none" => None,
                    v => Some(parse_f64(key, v)?),
                }
            }
            "output.path" => self.output = Some(PathBuf::from(value)),
            "validate.bits" => self.validate_bits = parse_u64(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    fn set_metric(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |reason: &str| ConfigError::Value {
            key: key.into(),
            value: value.into(),
            reason: reason.into(),
        };
        match key {
            "run.metric" => {
                self.outage = match value {
                    "ber" => false,
                    "outage" => true,
                    _ => return Err(bad("expected ber or outage")),
                }
            }
            "run.target" => {
                self.target =
                    Probability::new(parse_f64(key, value)?).map_err(|_| bad("target BER must lie in [0, 1]"))?
            }
            _ => {
                self.outage_method = match value {
                    "threshold" => OutageMethod::Threshold,
                    "direct" => OutageMethod::Direct,
                    _ => return Err(bad("expected threshold or direct")),
                }
            }
        }
        Ok(())
    }

    pub fn metric(&self) -> SweepMetric {
        if self.outage {
            SweepMetric::Outage { target: self.target, method: self.outage_method }
        } else {
            SweepMetric::Ber
        }
    }

    /// Scenario with the configured SNR applied.
    pub fn resolved_scenario(&self) -> Scenario {
        let mut s = self.scenario;
        if let Some(snr) = self.snr_db {
            s.radiometry = s.radiometry.with_snr_db(snr);
        }
        s
    }

    /// Checks every invariant; the message names the violated one.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| ConfigError::Invalid(m);
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                return Err(invalid(format!("radiometry.snr_db = {snr}: must be finite")));
            }
        }
        let scenario = self.resolved_scenario();
        scenario.validate().map_err(|e| invalid(e.to_string()))?;
        self.mc.validate().map_err(|e| invalid(e.to_string()))?;
        if self.grid.is_empty() {
            return Err(invalid("grid must be nonempty".into()));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(invalid("grid values must be finite".into()));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("grid must be strictly increasing".into()));
        }
        if self.schemes.is_empty() {
            return Err(invalid("run.schemes must name at least one scheme".into()));
        }
        for &v in &self.grid {
            let point = self.axis.apply(&scenario, v);
            point
                .validate()
                .map_err(|e| invalid(format!("sweep.grid value {v}: {e}")))?;
            if self.outage {
                for &s in &self.schemes {
                    outage_threshold(s, &point.radiometry, self.target).map_err(|e| invalid(e.to_string()))?;
                }
            }
        }
        if self.validate_bits == 0 {
            return Err(invalid("validate.bits must be at least 1".into()));
        }
        Ok(())
    }
}
