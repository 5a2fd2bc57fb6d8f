//! Photon wavepackets in the frequency domain and the quadrature engine.
//!
//! Profiles are parameterized by their center ω₀ and the FWHM σ of the
//! intensity |ξ(ω)|² (the full width for the square shape). Amplitude phase
//! conventions:
//!
//! * Lorentzian: ξ(ω) = i·√(σ/2π) / (ω − ω₀ + iσ/2), the spontaneous-emission
//!   pole shape, real and positive at ω₀.
//! * Gaussian and square: real and non-negative everywhere.
//!
//! The intensity is blind to this choice but two-photon interference is not.

pub mod quadrature;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
pub use quadrature::{
    integrate_1d, integrate_2d, integrate_nested, Domain, Integral, QuadValue, QuadratureSpec, Rule,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    Monochromatic,
    Lorentzian,
    Gaussian,
    Square,
}

impl ProfileKind {
    pub const BROADBAND: [ProfileKind; 3] =
        [ProfileKind::Lorentzian, ProfileKind::Gaussian, ProfileKind::Square];

    pub fn name(&self) -> &'static str {
        match self {
            ProfileKind::Monochromatic => "monochromatic",
            ProfileKind::Lorentzian => "lorentzian",
            ProfileKind::Gaussian => "gaussian",
            ProfileKind::Square => "square",
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "monochromatic" | "mono" => Ok(ProfileKind::Monochromatic),
            "lorentzian" | "lorentz" => Ok(ProfileKind::Lorentzian),
            "gaussian" | "gauss" => Ok(ProfileKind::Gaussian),
            "square" | "rect" => Ok(ProfileKind::Square),
            other => Err(Error::param(format!("unknown envelope kind '{other}'"))),
        }
    }
}

/// A single-photon spectral amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralProfile {
    kind: ProfileKind,
    center: f64,
    sigma: Option<f64>,
}

impl SpectralProfile {
    pub fn new(kind: ProfileKind, center: f64, sigma: Option<f64>) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::param(format!("envelope center must be finite, got {center}")));
        }
        match (kind, sigma) {
            (ProfileKind::Monochromatic, _) => Ok(Self { kind, center, sigma: None }),
            (_, Some(s)) if s.is_finite() && s > 0.0 => Ok(Self { kind, center, sigma: Some(s) }),
            (_, Some(s)) => Err(Error::param(format!("envelope width must be positive, got {s}"))),
            (_, None) => Err(Error::param(format!("a {kind} envelope needs a width"))),
        }
    }

    pub fn monochromatic(center: f64) -> Result<Self> {
        Self::new(ProfileKind::Monochromatic, center, None)
    }

    pub fn lorentzian(center: f64, sigma: f64) -> Result<Self> {
        Self::new(ProfileKind::Lorentzian, center, Some(sigma))
    }

    pub fn gaussian(center: f64, sigma: f64) -> Result<Self> {
        Self::new(ProfileKind::Gaussian, center, Some(sigma))
    }

    pub fn square(center: f64, sigma: f64) -> Result<Self> {
        Self::new(ProfileKind::Square, center, Some(sigma))
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }

    pub fn is_monochromatic(&self) -> bool {
        self.kind == ProfileKind::Monochromatic
    }

    pub fn shifted(&self, offset: f64) -> Self {
        Self { center: self.center + offset, ..*self }
    }

    /// Support of a square profile.
    pub fn support(&self) -> Option<(f64, f64)> {
        match (self.kind, self.sigma) {
            (ProfileKind::Square, Some(s)) => Some((self.center - 0.5 * s, self.center + 0.5 * s)),
            _ => None,
        }
    }

    /// ξ(ω). Monochromatic profiles have no pointwise value.
    pub fn evaluate(&self, omega: f64) -> Result<Complex64> {
        if self.is_monochromatic() {
            return Err(Error::MonochromaticEvaluation);
        }
        Ok(self.amplitude(omega))
    }

    /// |ξ(ω)|²
    pub fn intensity(&self, omega: f64) -> Result<f64> {
        self.evaluate(omega).map(|a| a.norm_sqr())
    }

    /// Pointwise amplitude of a broadband profile; zero for monochromatic ones.
    pub(crate) fn amplitude(&self, omega: f64) -> Complex64 {
        let x = omega - self.center;
        match (self.kind, self.sigma) {
            (ProfileKind::Lorentzian, Some(s)) => {
                Complex64::new(0.0, (s / (2.0 * PI)).sqrt()) / Complex64::new(x, 0.5 * s)
            }
            (ProfileKind::Gaussian, Some(s)) => {
                let sd = gaussian_sd(s);
                let norm = (2.0 * PI * sd * sd).powf(-0.25);
                Complex64::new(norm * (-x * x / (4.0 * sd * sd)).exp(), 0.0)
            }
            (ProfileKind::Square, Some(s)) if x.abs() <= 0.5 * s => Complex64::new(s.powf(-0.5), 0.0),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Where the amplitude has structure: (position, half-width, hard edge).
    pub(crate) fn feature(&self) -> Option<Feature> {
        let s = self.sigma?;
        Some(Feature { position: self.center, half_width: 0.5 * s, hard: self.kind == ProfileKind::Square })
    }

    /// The rule used to re-integrate the profile on its own.
    pub fn quadrature_spec(&self) -> Result<QuadratureSpec> {
        let s = self.sigma.ok_or(Error::MonochromaticEvaluation)?;
        Ok(match self.support() {
            Some((lo, hi)) => QuadratureSpec::window(0.5 * (lo + hi), 0.5 * (hi - lo)),
            None => QuadratureSpec::line(self.center, 0.5 * s).with_breakpoints([self.center]),
        })
    }

    /// ∫|ξ|² evaluated numerically.
    pub fn norm(&self) -> Result<f64> {
        let spec = self.quadrature_spec()?.with_tolerance(1e-12);
        Ok(integrate_1d(|w| self.amplitude(w).norm_sqr(), &spec)?.value)
    }
}

impl fmt::Display for SpectralProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sigma {
            Some(s) => write!(f, "{}(center={}, sigma={})", self.kind, self.center, s),
            None => write!(f, "{}(omega={})", self.kind, self.center),
        }
    }
}

/// Standard deviation of the Gaussian intensity with FWHM `fwhm`.
fn gaussian_sd(fwhm: f64) -> f64 {
    fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt())
}

/// A separable two-photon amplitude ξ(ω, ω′) = ξ_a(ω)·ξ_b(ω′), photon `a` in
/// the upper input arm and photon `b` in the lower one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointEnvelope {
    a: SpectralProfile,
    b: SpectralProfile,
}

impl JointEnvelope {
    /// Both profiles must be broadband, or both monochromatic.
    pub fn new(a: SpectralProfile, b: SpectralProfile) -> Result<Self> {
        if a.is_monochromatic() != b.is_monochromatic() {
            return Err(Error::param(
                "joint envelope mixes a monochromatic and a broadband photon",
            ));
        }
        Ok(Self { a, b })
    }

    pub fn identical(profile: SpectralProfile) -> Self {
        Self { a: profile, b: profile }
    }

    pub fn a(&self) -> &SpectralProfile {
        &self.a
    }

    pub fn b(&self) -> &SpectralProfile {
        &self.b
    }

    pub fn is_monochromatic(&self) -> bool {
        self.a.is_monochromatic()
    }

    pub fn is_exchange_symmetric(&self) -> bool {
        self.a == self.b
    }

    pub fn shifted(&self, offset: f64) -> Self {
        Self { a: self.a.shifted(offset), b: self.b.shifted(offset) }
    }

    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a }
    }

    pub fn evaluate(&self, omega: f64, omega_prime: f64) -> Result<Complex64> {
        Ok(self.a.evaluate(omega)? * self.b.evaluate(omega_prime)?)
    }

    /// δξ(ω, ω′) = ξ(ω, ω′) − ξ(ω′, ω).
    pub fn exchange_difference(&self, omega: f64, omega_prime: f64) -> Result<Complex64> {
        Ok(self.evaluate(omega, omega_prime)? - self.evaluate(omega_prime, omega)?)
    }

    pub(crate) fn amplitude(&self, omega: f64, omega_prime: f64) -> Complex64 {
        self.a.amplitude(omega) * self.b.amplitude(omega_prime)
    }
}

/// A location where an integrand changes character.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Feature {
    pub position: f64,
    pub half_width: f64,
    /// Discontinuities at position ± half_width rather than a smooth peak.
    pub hard: bool,
}

impl Feature {
    pub fn soft(position: f64, half_width: f64) -> Self {
        Self { position, half_width, hard: false }
    }

    /// Image under x ↦ offset + factor·x.
    pub fn mapped(&self, offset: f64, factor: f64) -> Self {
        Self {
            position: offset + factor * self.position,
            half_width: factor.abs() * self.half_width,
            hard: self.hard,
        }
    }

    /// Edges of a hard feature, or for a soft one its position plus a
    /// geometric ladder p ± w·4ʲ reaching out to `extent`.
    pub fn push_breakpoints(&self, out: &mut Vec<f64>, extent: f64) {
        let (p, w) = (self.position, self.half_width);
        if self.hard {
            out.extend([p - w, p + w]);
            return;
        }
        out.push(p);
        let mut d = w;
        for _ in 0..MAX_LADDER {
            out.extend([p - d, p + d]);
            if d >= extent {
                break;
            }
            d *= 4.0;
        }
    }
}

const MAX_LADDER: usize = 16;

/// A real-line rule scaled to the spread of `features`, with every feature
/// resolved by breakpoints.
pub(crate) fn line_spec(features: &[Feature]) -> QuadratureSpec {
    let lo = features.iter().map(|f| f.position - f.half_width).fold(f64::INFINITY, f64::min);
    let hi = features.iter().map(|f| f.position + f.half_width).fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    let mut points = Vec::new();
    for f in features {
        f.push_breakpoints(&mut points, spread);
    }
    QuadratureSpec::line(0.5 * (lo + hi), 0.5 * spread).with_breakpoints(points)
}

/// A rule on [lo, hi] with every feature resolved by breakpoints.
pub(crate) fn window_spec(lo: f64, hi: f64, features: &[Feature]) -> QuadratureSpec {
    let mut points = Vec::new();
    for f in features {
        f.push_breakpoints(&mut points, hi - lo);
    }
    QuadratureSpec::window(0.5 * (lo + hi), 0.5 * (hi - lo)).with_breakpoints(points)
}
