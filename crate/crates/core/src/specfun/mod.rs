//! Special functions and random variate generation.
//!
//! `erf`/`erfc` and `ln_gamma` delegate to `libm` (a port of the musl
//! implementations, accurate to about 1 ulp). The Gaussian tail function,
//! its inverse, and the modified Bessel function of the second kind are
//! implemented here.

mod bessel;
mod random;

pub use bessel::{bessel_k, bessel_k_scaled};
pub use random::{sample_gamma, Gamma, RngStream};

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use thiserror::Error;

/// Errors raised by special-function evaluation and variate sampling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("{what} = {value} is outside the domain of the function")]
    Domain { what: &'static str, value: f64 },
    #[error("{what} must be strictly positive and finite, got {value}")]
    Parameter { what: &'static str, value: f64 },
    #[error("result overflows f64 at order {order}, x = {x}")]
    Overflow { order: f64, x: f64 },
}

/// A probability in `[0, 1]`. NaN is rejected at construction.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
#[repr(transparent)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const HALF: Probability = Probability(0.5);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(p: f64) -> Result<Self, SpecFunError> {
        if (0.0..=1.0).contains(&p) {
            Ok(Probability(p))
        } else {
            Err(SpecFunError::Domain {
                what: "probability",
                value: p,
            })
        }
    }

    /// Wraps a value already known to lie in `[0, 1]`. Callers are internal
    /// formulas whose outputs are bounded by construction.
    pub(crate) fn from_bounded(p: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
        Probability(p)
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x) = erfc(x/sqrt 2)/2`.
#[inline]
pub fn q_function(x: f64) -> Probability {
    Probability::from_bounded(q_raw(x))
}

#[inline]
pub(crate) fn q_raw(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Inverse of [`q_function`] on the open interval `(0, 1)`.
///
/// Bisection brackets the root to a narrow interval, then Newton steps on
/// `ln Q(x) - ln p` polish it. Working with the logarithm keeps the relative
/// accuracy uniform deep into the tail.
pub fn q_inverse(p: f64) -> Result<f64, SpecFunError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(SpecFunError::Domain {
            what: "q_inverse argument",
            value: p,
        });
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        return q_inverse(1.0 - p).map(|x| -x);
    }

    // Q(38.5) is below the smallest subnormal, so [0, 38.5] brackets every
    // representable p in (0, 0.5).
    let target = p.ln();
    let residual = |x: f64| q_raw(x).ln() - target;
    let (mut lo, mut hi) = (0.0_f64, 38.5_f64);
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..50 {
        let q = q_raw(x);
        let r = q.ln() - target;
        // d/dx ln Q(x) = -phi(x) / Q(x)
        let slope = -normal_pdf(x) / q;
        let mut next = x - r / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if r > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = (next - x).abs();
        x = next;
        if step <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    Ok(x)
}
