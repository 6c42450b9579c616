//! Link-level models and estimators for a two-transmitter, two-receiver
//! free-space-optical link using binary pulse position modulation (BPPM).
//!
//! The crate covers three signaling schemes over gamma-gamma turbulence with
//! Gaussian pointing jitter:
//!
//! * spatial multiplexing, where each transmitter carries its own stream;
//! * repetition diversity, where both transmitters carry the same stream;
//! * half-slot space-time multiplexing, where the second transmitter is
//!   delayed by half a slot so its interference spreads over both PPM slots.
//!
//! [`schemes`] holds closed-form conditional error probabilities and outage
//! thresholds, [`engine`] averages them over sampled channels, and [`oracle`]
//! simulates the slot-level waveform as an independent ground truth.

// Float constants carry their published digits, and `!(x > 0.0)` is used on
// purpose so that NaN fails validation.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod engine;
pub mod oracle;
pub mod quadrature;
pub mod schemes;
pub mod specfun;

use thiserror::Error;

pub use channel::{
    beam_constants, draw_channel, gamma_gamma_pdf, pointing_loss, sample_fading, sample_pointing, BeamConstants,
    ChannelDraw, ChannelSampler, Fading, LinkGeometry, PointingParams, TurbulenceParams,
};
pub use engine::{
    average_ber, outage_probability, sweep, BerEstimate, McConfig, OutageEstimate, OutageMethod, Scenario, SweepAxis,
    SweepMetric, SweepRow,
};
pub use schemes::{outage_indicator, outage_threshold, Radiometry, Scheme};
pub use specfun::{Probability, RngStream, SpecFunError};

/// A parameter failed validation. `what` names the offending key using the
/// dotted config spelling (`geometry.r_a`, `mc.samples`, ...).
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{what} = {value}: {reason}")]
pub struct ParamError {
    pub what: &'static str,
    pub value: f64,
    pub reason: &'static str,
}

impl ParamError {
    pub fn new(what: &'static str, value: f64, reason: &'static str) -> Self {
        ParamError { what, value, reason }
    }
}

impl From<SpecFunError> for ParamError {
    fn from(e: SpecFunError) -> Self {
        match e {
            SpecFunError::Domain { what, value } => ParamError::new(what, value, "outside the function domain"),
            SpecFunError::Parameter { what, value } => ParamError::new(what, value, "must be positive and finite"),
            SpecFunError::Overflow { x, .. } => ParamError::new("bessel_k argument", x, "result overflows"),
        }
    }
}
