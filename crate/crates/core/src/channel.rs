//! Beam geometry, pointing jitter and gamma-gamma turbulence.
//!
//! Index convention: `tx` is the transmitter (beam) index and `rx` the
//! receiver index, both zero-based. Receiver `i` is aimed at by transmitter
//! `i`; the other beam arrives offset by the receiver separation `d`.

use std::f64::consts::PI;

use crate::specfun::{bessel_k_scaled, erf, ln_gamma, Gamma, RngStream};
use crate::ParamError;

/// Receiver and beam geometry. Wavelength and link length are carried as
/// metadata only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Receiver aperture radius `r_a` (m).
    pub aperture_radius: f64,
    /// Beam waist at the receiver plane `w_z` (m).
    pub beam_waist: f64,
    /// Distance between the two receivers `d` (m).
    pub receiver_separation: f64,
    pub wavelength: f64,
    pub link_length: f64,
}

impl Default for LinkGeometry {
    fn default() -> Self {
        LinkGeometry {
            aperture_radius: 0.10,
            beam_waist: 1.0,
            receiver_separation: 1.0,
            wavelength: 1.5e-6,
            link_length: 1000.0,
        }
    }
}

impl LinkGeometry {
    pub fn validate(&self) -> Result<(), ParamError> {
        positive("geometry.r_a", self.aperture_radius)?;
        positive("geometry.w_z", self.beam_waist)?;
        non_negative("geometry.d", self.receiver_separation)?;
        positive("geometry.wavelength", self.wavelength)?;
        positive("geometry.link_length", self.link_length)?;
        Ok(())
    }
}

/// Zero-mean Gaussian beam-center displacement on the receiver plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingParams {
    pub sigma_x: f64,
    pub sigma_y: f64,
}

impl Default for PointingParams {
    fn default() -> Self {
        PointingParams {
            sigma_x: 0.05,
            sigma_y: 0.05,
        }
    }
}

impl PointingParams {
    pub fn isotropic(sigma: f64) -> Self {
        PointingParams {
            sigma_x: sigma,
            sigma_y: sigma,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        non_negative("pointing.sigma_x", self.sigma_x)?;
        non_negative("pointing.sigma_y", self.sigma_y)?;
        Ok(())
    }
}

/// Gamma-gamma shape parameters (large- and small-scale eddies).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbulenceParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for TurbulenceParams {
    fn default() -> Self {
        TurbulenceParams {
            alpha: 11.7,
            beta: 10.2,
        }
    }
}

impl TurbulenceParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        positive("turbulence.alpha", self.alpha)?;
        positive("turbulence.beta", self.beta)?;
        Ok(())
    }
}

/// Fading law applied independently to each of the four links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fading {
    GammaGamma(TurbulenceParams),
    /// Deterministic `h = 1`; used for degenerate checks.
    Unit,
}

impl Default for Fading {
    fn default() -> Self {
        Fading::GammaGamma(TurbulenceParams::default())
    }
}

impl Fading {
    pub fn validate(&self) -> Result<(), ParamError> {
        match self {
            Fading::GammaGamma(t) => t.validate(),
            Fading::Unit => Ok(()),
        }
    }
}

/// Constants of the Gaussian-beam collection model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamConstants {
    /// Maximal collected fraction `A_0 = erf(nu)^2`.
    pub a0: f64,
    /// Equivalent beam width `w_eq` (m).
    pub w_eq: f64,
    pub nu: f64,
}

impl BeamConstants {
    /// Collected fraction for a beam whose center sits at `(x, y)` relative
    /// to the aperture center.
    #[inline]
    pub fn collected(&self, x: f64, y: f64) -> f64 {
        self.a0 * (-2.0 * (x * x + y * y) / (self.w_eq * self.w_eq)).exp()
    }
}

pub fn beam_constants(geom: &LinkGeometry) -> BeamConstants {
    let nu = PI.sqrt() * geom.aperture_radius / (2f64.sqrt() * geom.beam_waist);
    let e = erf(nu);
    let w_eq2 = geom.beam_waist * geom.beam_waist * PI.sqrt() * e / (2.0 * nu * (-nu * nu).exp());
    BeamConstants {
        a0: e * e,
        w_eq: w_eq2.sqrt(),
        nu,
    }
}

/// Fraction of a beam's power collected by an aperture given the shared
/// displacement `(x_p, y_p)`. A cross beam (`cross = true`) is additionally
/// offset by the receiver separation.
pub fn pointing_loss(geom: &LinkGeometry, x_p: f64, y_p: f64, cross: bool) -> f64 {
    let offset = if cross { geom.receiver_separation } else { 0.0 };
    beam_constants(geom).collected(x_p + offset, y_p)
}

pub fn sample_pointing(rng: &mut RngStream, p: &PointingParams) -> (f64, f64) {
    let x = rng.standard_normal();
    let y = rng.standard_normal();
    (p.sigma_x * x, p.sigma_y * y)
}

/// Unit-mean gamma-gamma sampler: product of `Gamma(alpha, 1/alpha)` and
/// `Gamma(beta, 1/beta)`.
#[derive(Debug, Clone, Copy)]
pub struct GammaGamma {
    large: Gamma,
    small: Gamma,
}

impl GammaGamma {
    pub fn new(t: &TurbulenceParams) -> Result<Self, ParamError> {
        t.validate()?;
        Ok(GammaGamma {
            large: Gamma::new(t.alpha, 1.0 / t.alpha)?,
            small: Gamma::new(t.beta, 1.0 / t.beta)?,
        })
    }

    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        self.large.sample(rng) * self.small.sample(rng)
    }
}

pub fn sample_fading(rng: &mut RngStream, t: &TurbulenceParams) -> Result<f64, ParamError> {
    Ok(GammaGamma::new(t)?.sample(rng))
}

/// Gamma-gamma probability density, evaluated in log space so that large
/// shape parameters do not overflow the prefactor.
pub fn gamma_gamma_pdf(h: f64, t: &TurbulenceParams) -> Result<f64, ParamError> {
    t.validate()?;
    if !(h > 0.0) || !h.is_finite() {
        return Err(ParamError::new("h", h, "must be positive and finite"));
    }
    let (a, b) = (t.alpha, t.beta);
    let z = 2.0 * (a * b * h).sqrt();
    let k_scaled = bessel_k_scaled(a - b, z)?;
    let ln_f = 2f64.ln() + 0.5 * (a + b) * (a * b).ln() - ln_gamma(a) - ln_gamma(b)
        + (0.5 * (a + b) - 1.0) * h.ln()
        + k_scaled.ln()
        - z;
    Ok(ln_f.exp())
}

/// One joint channel realization: four fading gains, one displacement and
/// the resulting collected fractions. `fading[tx][rx]`, `collection[tx][rx]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub fading: [[f64; 2]; 2],
    pub x_p: f64,
    pub y_p: f64,
    pub collection: [[f64; 2]; 2],
}

impl ChannelDraw {
    /// Builds a draw from explicit gains; collected fractions follow from
    /// the geometry with `cross = (tx != rx)`.
    pub fn from_parts(beam: &BeamConstants, d: f64, fading: [[f64; 2]; 2], x_p: f64, y_p: f64) -> Self {
        let own = beam.collected(x_p, y_p);
        let cross = beam.collected(x_p + d, y_p);
        ChannelDraw {
            fading,
            x_p,
            y_p,
            collection: [[own, cross], [cross, own]],
        }
    }

    /// Effective gain `g * h` of beam `tx` at receiver `rx`.
    #[inline]
    pub fn gain(&self, tx: usize, rx: usize) -> f64 {
        self.collection[tx][rx] * self.fading[tx][rx]
    }

    /// Sum of all four effective gains.
    #[inline]
    pub fn total_gain(&self) -> f64 {
        self.gain(0, 0) + self.gain(0, 1) + self.gain(1, 0) + self.gain(1, 1)
    }
}

/// Precomputed sampler for [`ChannelDraw`]s under fixed parameters.
///
/// Each draw consumes the random stream in a fixed order (four fading gains
/// `h_11, h_21, h_12, h_22`, then two standard normals for the displacement),
/// and the randomness does not depend on geometry or jitter scale. Two
/// samplers that differ only in geometry, jitter or radiometry therefore see
/// common random numbers when fed identical streams.
#[derive(Debug, Clone, Copy)]
pub struct ChannelSampler {
    beam: BeamConstants,
    separation: f64,
    pointing: PointingParams,
    fading: Option<GammaGamma>,
}

impl ChannelSampler {
    pub fn new(geom: &LinkGeometry, fading: &Fading, pointing: &PointingParams) -> Result<Self, ParamError> {
        geom.validate()?;
        pointing.validate()?;
        let fading = match fading {
            Fading::GammaGamma(t) => Some(GammaGamma::new(t)?),
            Fading::Unit => None,
        };
        Ok(ChannelSampler {
            beam: beam_constants(geom),
            separation: geom.receiver_separation,
            pointing: *pointing,
            fading,
        })
    }

    pub fn beam(&self) -> &BeamConstants {
        &self.beam
    }

    pub fn draw(&self, rng: &mut RngStream) -> ChannelDraw {
        let mut h = [[1.0; 2]; 2];
        if let Some(gg) = &self.fading {
            // Stream order h11, h21, h12, h22.
            for rx in 0..2 {
                for row in h.iter_mut() {
                    row[rx] = gg.sample(rng);
                }
            }
        }
        let (x_p, y_p) = sample_pointing(rng, &self.pointing);
        ChannelDraw::from_parts(&self.beam, self.separation, h, x_p, y_p)
    }
}

pub fn draw_channel(
    rng: &mut RngStream,
    geom: &LinkGeometry,
    turbulence: &TurbulenceParams,
    pointing: &PointingParams,
) -> Result<ChannelDraw, ParamError> {
    Ok(ChannelSampler::new(geom, &Fading::GammaGamma(*turbulence), pointing)?.draw(rng))
}

fn positive(what: &'static str, v: f64) -> Result<(), ParamError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ParamError::new(what, v, "must be positive and finite"))
    }
}

fn non_negative(what: &'static str, v: f64) -> Result<(), ParamError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ParamError::new(what, v, "must be non-negative and finite"))
    }
}
