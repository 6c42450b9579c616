//! Closed-form conditional bit error rates and outage thresholds.
//!
//! All conditional BERs are for a known channel (`g`, `h` fixed) and are
//! evaluated at receiver 1 unless a receiver index is given; the model is
//! symmetric between the two transceiver pairs.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::channel::ChannelDraw;
use crate::specfun::{q_inverse, q_raw, Probability};
use crate::ParamError;

/// Photodetector and noise parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radiometry {
    /// Responsivity `R` (A/W).
    pub responsivity: f64,
    /// Transmit power per laser `P_t` (W).
    pub transmit_power: f64,
    /// Slot duration `T_s` (s).
    pub slot_duration: f64,
    /// One-sided noise spectral density `N_0`.
    pub noise_density: f64,
}

impl Default for Radiometry {
    /// `R = 1 A/W`, `T_s = 1 ns`, `N_0 = 1e-20`, and `P_t` set for the
    /// default SNR of [`Radiometry::DEFAULT_SNR_DB`].
    fn default() -> Self {
        Radiometry {
            responsivity: 1.0,
            transmit_power: 1.0,
            slot_duration: 1e-9,
            noise_density: 1e-20,
        }
        .with_snr_db(Self::DEFAULT_SNR_DB)
    }
}

impl Radiometry {
    pub const DEFAULT_SNR_DB: f64 = 45.0;

    pub fn validate(&self) -> Result<(), ParamError> {
        for (what, v) in [
            ("radiometry.responsivity", self.responsivity),
            ("radiometry.transmit_power", self.transmit_power),
            ("radiometry.slot_duration", self.slot_duration),
            ("radiometry.noise_density", self.noise_density),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ParamError::new(what, v, "must be positive and finite"));
            }
        }
        Ok(())
    }

    /// Scale `c = R P_t sqrt(T_s) / sqrt(N_0)` mapping an effective gain
    /// `g h` to the argument of `Q`.
    #[inline]
    pub fn q_scale(&self) -> f64 {
        self.responsivity * self.transmit_power * self.slot_duration.sqrt() / self.noise_density.sqrt()
    }

    /// Per-slot noise variance `N_0 T_s / 2`.
    pub fn noise_variance(&self) -> f64 {
        0.5 * self.noise_density * self.slot_duration
    }

    /// `10 log10((R P_t)^2 T_s / N_0)`, the squared `Q` argument at unit gain.
    pub fn snr_db(&self) -> f64 {
        20.0 * self.q_scale().log10()
    }

    /// Same detector and noise, with the transmit power chosen to hit `snr_db`.
    pub fn with_snr_db(self, snr_db: f64) -> Self {
        let c = 10f64.powf(snr_db / 20.0);
        Radiometry {
            transmit_power: c * self.noise_density.sqrt() / (self.responsivity * self.slot_duration.sqrt()),
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Multiplexing,
    Diversity,
    SpaceTime,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Multiplexing, Scheme::Diversity, Scheme::SpaceTime];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Multiplexing => "multiplexing",
            Scheme::Diversity => "diversity",
            Scheme::SpaceTime => "spacetime",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown scheme {0:?} (expected multiplexing, diversity or spacetime)")]
pub struct UnknownScheme(pub String);

impl FromStr for Scheme {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "multiplexing" | "mux" => Ok(Scheme::Multiplexing),
            "diversity" | "div" => Ok(Scheme::Diversity),
            "spacetime" | "space-time" | "st" => Ok(Scheme::SpaceTime),
            _ => Err(UnknownScheme(s.to_string())),
        }
    }
}

/// Effective gains seen by one receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGains {
    /// `g h` of the receiver's own beam.
    pub own: f64,
    /// `g h` of the other transmitter's beam at this receiver.
    pub cross: f64,
    /// Sum of all four `g h`, used by the diversity combiner.
    pub total: f64,
}

impl LinkGains {
    pub fn at_receiver(draw: &ChannelDraw, rx: usize) -> Self {
        let other = 1 - rx;
        LinkGains {
            own: draw.gain(rx, rx),
            cross: draw.gain(other, rx),
            total: draw.total_gain(),
        }
    }
}

/// `1/2 Q(c (a + b)) + 1/2 Q(c (a - b))` for own gain `a`, cross gain `b`.
#[inline]
pub fn cond_ber_multiplexing(rad: &Radiometry, own: f64, cross: f64) -> Probability {
    let c = rad.q_scale();
    Probability::from_bounded(0.5 * q_raw(c * (own + cross)) + 0.5 * q_raw(c * (own - cross)))
}

/// Equal-gain combination of all four links: `Q(c S / sqrt 2)`.
#[inline]
pub fn cond_ber_diversity(rad: &Radiometry, total: f64) -> Probability {
    Probability::from_bounded(q_raw(rad.q_scale() * total / SQRT_2))
}

/// Half-slot space-time scheme:
/// `3/4 Q(c a) + 1/8 Q(c (a + b/2)) + 1/8 Q(c (a - b/2))`.
///
/// The weights follow the published neighbor-bit table. The slot-level
/// enumeration in [`crate::oracle::enumerate_st_weights`] gives `1/2, 1/4,
/// 1/4` instead, because the tail of a delayed "0" pulse also lands in the
/// next symbol's first slot; this function is kept as published and the
/// discrepancy is reported by the oracle.
#[inline]
pub fn cond_ber_spacetime(rad: &Radiometry, own: f64, cross: f64) -> Probability {
    let c = rad.q_scale();
    let a = c * own;
    let b = 0.5 * c * cross;
    Probability::from_bounded(0.75 * q_raw(a) + 0.125 * q_raw(a + b) + 0.125 * q_raw(a - b))
}

/// Dominant term of [`cond_ber_spacetime`], `1/8 Q(c (a - b/2))`. Only a good
/// approximation when interference is strong (small receiver separation).
#[inline]
pub fn cond_ber_spacetime_lowd(rad: &Radiometry, own: f64, cross: f64) -> Probability {
    Probability::from_bounded(0.125 * q_raw(rad.q_scale() * (own - 0.5 * cross)))
}

/// Conditional BER of `scheme` at receiver `rx`.
pub fn cond_ber_at(scheme: Scheme, rad: &Radiometry, draw: &ChannelDraw, rx: usize) -> Probability {
    let g = LinkGains::at_receiver(draw, rx);
    match scheme {
        Scheme::Multiplexing => cond_ber_multiplexing(rad, g.own, g.cross),
        Scheme::Diversity => cond_ber_diversity(rad, g.total),
        Scheme::SpaceTime => cond_ber_spacetime(rad, g.own, g.cross),
    }
}

/// Conditional BER of `scheme` at receiver 1.
#[inline]
pub fn cond_ber(scheme: Scheme, rad: &Radiometry, draw: &ChannelDraw) -> Probability {
    cond_ber_at(scheme, rad, draw, 0)
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("target BER {target} is meaningless for {scheme}: Q^-1 argument {scaled} is outside (0, 1)")]
pub struct TargetOutOfRange {
    pub scheme: Scheme,
    pub target: f64,
    pub scaled: f64,
}

/// Gain threshold below which the channel is in outage for a target BER.
///
/// * multiplexing: `Q^-1(2 P_t) / c`, event `g11 h11 - g21 h21 < A`
/// * diversity: `sqrt 2 Q^-1(P_t) / c`, event `sum g h < A`
/// * space-time: `Q^-1(8 P_t) / c`, event `g11 h11 - g21 h21 / 2 < A`
pub fn outage_threshold(scheme: Scheme, rad: &Radiometry, target: Probability) -> Result<f64, TargetOutOfRange> {
    let (factor, weight) = match scheme {
        Scheme::Multiplexing => (1.0, 2.0),
        Scheme::Diversity => (SQRT_2, 1.0),
        Scheme::SpaceTime => (1.0, 8.0),
    };
    let scaled = weight * target.get();
    let x = q_inverse(scaled).map_err(|_| TargetOutOfRange {
        scheme,
        target: target.get(),
        scaled,
    })?;
    Ok(factor * x / rad.q_scale())
}

/// Whether the draw falls in the (approximate) outage event for `scheme`.
#[inline]
pub fn outage_indicator(scheme: Scheme, draw: &ChannelDraw, threshold: f64) -> bool {
    let g = LinkGains::at_receiver(draw, 0);
    match scheme {
        Scheme::Multiplexing => g.own - g.cross < threshold,
        Scheme::Diversity => g.total < threshold,
        Scheme::SpaceTime => g.own - 0.5 * g.cross < threshold,
    }
}
