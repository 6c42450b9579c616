use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};

use super::SpecFunError;

/// A seeded, reproducible random stream.
///
/// Streams are identified by `(master_seed, stream_index)`; distinct indices
/// select non-overlapping ChaCha keystreams, so parallel workers never share
/// state and results do not depend on scheduling.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_index);
        RngStream { inner }
    }

    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        self.inner.sample(Open01)
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    #[inline]
    pub fn bit(&mut self) -> bool {
        self.inner.random()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Gamma distribution with the given shape and scale.
///
/// Sampling uses Marsaglia and Tsang's squeeze/rejection method. For
/// `shape < 1` a `Gamma(shape + 1)` variate is drawn and multiplied by
/// `U^(1/shape)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma {
    shape: f64,
    scale: f64,
    d: f64,
    c: f64,
    boost: bool,
}

impl Gamma {
    pub fn new(shape: f64, scale: f64) -> Result<Self, SpecFunError> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(SpecFunError::Parameter {
                what: "gamma shape",
                value: shape,
            });
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(SpecFunError::Parameter {
                what: "gamma scale",
                value: scale,
            });
        }
        let boost = shape < 1.0;
        let d = if boost { shape + 1.0 } else { shape } - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        Ok(Gamma {
            shape,
            scale,
            d,
            c,
            boost,
        })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let unit = loop {
            let x = rng.standard_normal();
            let t = 1.0 + self.c * x;
            if t <= 0.0 {
                continue;
            }
            let v = t * t * t;
            let u = rng.uniform_open();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + self.d * (1.0 - v + v.ln()) {
                break self.d * v;
            }
        };
        let unit = if self.boost {
            unit * rng.uniform_open().powf(1.0 / self.shape)
        } else {
            unit
        };
        unit * self.scale
    }
}

/// One draw from `Gamma(shape, scale)`.
pub fn sample_gamma(rng: &mut RngStream, shape: f64, scale: f64) -> Result<f64, SpecFunError> {
    Ok(Gamma::new(shape, scale)?.sample(rng))
}
