//! Single- and two-photon scattering off one chiral emitter.
//!
//! With Δ = ω − E and the total decay Γ + γ:
//!
//! ```text
//! t(ω)   = (Δ − i(Γ−γ)/2) / (Δ + i(Γ+γ)/2)      guided → guided
//! t_r(ω) = −i√(Γγ)       / (Δ + i(Γ+γ)/2)      guided → reservoir
//! s(ω)   = √Γ            / (Δ + i(Γ+γ)/2)
//! s_r(ω) = √γ            / (Δ + i(Γ+γ)/2)
//! ```
//!
//! A photon pair ξ(ω, ω′) in the guide leaves in three channels: both guided
//! (ξ̃), one guided and one lost (ξ̃ʳ), both lost (ξ̃ʳʳ). Each is a linear part
//! plus a bound-state part proportional to
//!
//! ```text
//! K(E) = ∫ dk [s(k) + s(E − k)] ξ(k, E − k),   E = ω + ω′.
//! ```
//!
//! The mixed channel is
//! ξ̃ʳ(ω, ω′) = t(ω)t_r(ω′)[ξ(ω,ω′) + ξ(ω′,ω)] + i(√Γ/π)s(ω)s_r(ω′)K,
//! where the first argument is the guided photon. Only with this form does the
//! two-photon flux stay conserved, ∫∫|ξ̃|² + ½∫∫|ξ̃ʳ|² + ∫∫|ξ̃ʳʳ|² = ∫∫|ξ_s|²
//! (see [`two_photon_flux`]).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::RwLock;

use num_complex::Complex64;

use crate::domain::EmitterParams;
use crate::envelopes::quadrature::{integrate_1d, integrate_nested, QuadratureSpec};
use crate::envelopes::{line_spec, window_spec, Feature, JointEnvelope, QuadValue};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Single-photon coefficients of one emitter at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterCoeffs {
    pub t: Complex64,
    pub t_r: Complex64,
    pub s: Complex64,
    pub s_r: Complex64,
}

impl ScatterCoeffs {
    pub fn at(omega: f64, emitter: &EmitterParams) -> Self {
        let gamma = emitter.loss_rate();
        let rate = emitter.rate();
        let detuning = omega - emitter.energy();
        let inv = Complex64::new(detuning, 0.5 * (rate + gamma)).inv();
        Self {
            t: Complex64::new(detuning, -0.5 * (rate - gamma)) * inv,
            t_r: Complex64::new(0.0, -(rate * gamma).sqrt()) * inv,
            s: rate.sqrt() * inv,
            s_r: gamma.sqrt() * inv,
        }
    }
}

pub fn transmission(omega: f64, emitter: &EmitterParams) -> Complex64 {
    ScatterCoeffs::at(omega, emitter).t
}

pub fn reservoir_transmission(omega: f64, emitter: &EmitterParams) -> Complex64 {
    ScatterCoeffs::at(omega, emitter).t_r
}

/// (s(ω), s_r(ω))
pub fn pole_functions(omega: f64, emitter: &EmitterParams) -> (Complex64, Complex64) {
    let c = ScatterCoeffs::at(omega, emitter);
    (c.s, c.s_r)
}

/// Which lossy two-photon channel to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReservoirChannel {
    /// One photon guided (first argument), one in the emitter's reservoir.
    GuidedReservoir,
    ReservoirReservoir,
}

/// Feature of the emitter's Lorentzian response.
fn emitter_feature(emitter: &EmitterParams) -> Feature {
    Feature::soft(emitter.energy(), 0.5 * emitter.total_rate())
}

/// Rule for the k-integral of K(E), or `None` when the integrand vanishes.
fn kernel_spec(xi: &JointEnvelope, emitter: &EmitterParams, total: f64, tolerance: f64) -> Option<QuadratureSpec> {
    let fa = xi.a().feature()?;
    // ξ_b(E − k) as a function of k.
    let fb = xi.b().feature()?.mapped(total, -1.0);
    let fe = emitter_feature(emitter);
    let features = [fa, fb, fe, fe.mapped(total, -1.0)];
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for f in [fa, fb].iter().filter(|f| f.hard) {
        lo = lo.max(f.position - f.half_width);
        hi = hi.min(f.position + f.half_width);
    }
    let spec = if lo.is_finite() || hi.is_finite() {
        if hi <= lo {
            return None;
        }
        window_spec(lo, hi, &features)
    } else {
        line_spec(&features)
    };
    Some(spec.with_tolerance(tolerance).with_abs_tolerance(1e-16))
}

pub(crate) fn kernel_with_tolerance(
    xi: &JointEnvelope,
    emitter: &EmitterParams,
    total: f64,
    tolerance: f64,
) -> Result<Complex64> {
    if xi.is_monochromatic() {
        return Err(Error::MonochromaticEvaluation);
    }
    let Some(spec) = kernel_spec(xi, emitter, total, tolerance) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let integrand = |k: f64| {
        let (s1, _) = pole_functions(k, emitter);
        let (s2, _) = pole_functions(total - k, emitter);
        (s1 + s2) * xi.amplitude(k, total - k)
    };
    integrate_1d(integrand, &spec)
        .map(|r| r.value)
        .map_err(|e| relabel(e, "scattering"))
}

fn relabel(err: Error, module: &'static str) -> Error {
    match err {
        Error::Quadrature { rounds, previous, last, change, .. } => {
            Error::Quadrature { module, rounds, previous, last, change }
        }
        other => other,
    }
}

/// K(E) = ∫ dk [s(k) + s(E − k)] ξ(k, E − k).
pub fn bound_state_kernel(xi: &JointEnvelope, emitter: &EmitterParams, total: f64) -> Result<Complex64> {
    kernel_with_tolerance(xi, emitter, total, 1e-9)
}

/// (i/2)(√Γ/π)·K, the factor multiplying s(ω)s(ω′) in ξ̃.
pub(crate) fn bound_prefactor(emitter: &EmitterParams, kernel: Complex64) -> Complex64 {
    I * (0.5 * emitter.rate().sqrt() / PI) * kernel
}

/// The three scattered amplitudes at one (ω, ω′).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PairChannels {
    pub guided: Complex64,
    /// ξ̃ʳ(ω, ω′), guided photon at ω.
    pub cross: Complex64,
    /// ξ̃ʳ(ω′, ω), guided photon at ω′.
    pub cross_swapped: Complex64,
    pub reservoir: Complex64,
}

/// Assembles the channels from the coefficients at ω (`a`) and ω′ (`b`), the
/// symmetrized input ξ_s(ω, ω′) and the bound-state prefactor.
pub(crate) fn pair_channels(
    a: &ScatterCoeffs,
    b: &ScatterCoeffs,
    xi_sym: Complex64,
    bound: Complex64,
) -> PairChannels {
    PairChannels {
        guided: a.t * b.t * xi_sym + bound * a.s * b.s,
        cross: 2.0 * (a.t * b.t_r * xi_sym + bound * a.s * b.s_r),
        cross_swapped: 2.0 * (b.t * a.t_r * xi_sym + bound * b.s * a.s_r),
        reservoir: a.t_r * b.t_r * xi_sym + bound * a.s_r * b.s_r,
    }
}

fn channels_at(
    xi: &JointEnvelope,
    emitter: &EmitterParams,
    omega: f64,
    omega_prime: f64,
    kernel: Complex64,
) -> PairChannels {
    let xi_sym = 0.5 * (xi.amplitude(omega, omega_prime) + xi.amplitude(omega_prime, omega));
    pair_channels(
        &ScatterCoeffs::at(omega, emitter),
        &ScatterCoeffs::at(omega_prime, emitter),
        xi_sym,
        bound_prefactor(emitter, kernel),
    )
}

fn check_broadband(xi: &JointEnvelope) -> Result<()> {
    if xi.is_monochromatic() {
        Err(Error::MonochromaticEvaluation)
    } else {
        Ok(())
    }
}

/// ξ̃(ω, ω′), both photons leaving in the guided mode.
pub fn scattered_envelope_guided(
    xi: &JointEnvelope,
    emitter: &EmitterParams,
    omega: f64,
    omega_prime: f64,
) -> Result<Complex64> {
    check_broadband(xi)?;
    let k = bound_state_kernel(xi, emitter, omega + omega_prime)?;
    Ok(channels_at(xi, emitter, omega, omega_prime, k).guided)
}

/// ξ̃ʳ(ω, ω′) or ξ̃ʳʳ(ω, ω′).
pub fn scattered_envelope_reservoir(
    xi: &JointEnvelope,
    emitter: &EmitterParams,
    omega: f64,
    omega_prime: f64,
    which: ReservoirChannel,
) -> Result<Complex64> {
    check_broadband(xi)?;
    let k = bound_state_kernel(xi, emitter, omega + omega_prime)?;
    let ch = channels_at(xi, emitter, omega, omega_prime, k);
    Ok(match which {
        ReservoirChannel::GuidedReservoir => ch.cross,
        ReservoirChannel::ReservoirReservoir => ch.reservoir,
    })
}

/// Memoizes K on the total energy E = ω + ω′, rounded to `resolution`.
///
/// Values are computed at the rounded energy, so a lookup never depends on
/// which caller filled the entry first.
#[derive(Debug)]
pub struct KernelCache {
    xi: JointEnvelope,
    emitter: EmitterParams,
    resolution: f64,
    map: RwLock<HashMap<i64, Complex64>>,
}

impl KernelCache {
    pub fn new(xi: JointEnvelope, emitter: EmitterParams, resolution: f64) -> Result<Self> {
        check_broadband(&xi)?;
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(Error::param(format!("cache resolution must be positive, got {resolution}")));
        }
        Ok(Self { xi, emitter, resolution, map: RwLock::new(HashMap::new()) })
    }

    pub fn kernel(&self, total: f64) -> Result<Complex64> {
        let key = (total / self.resolution).round() as i64;
        if let Some(k) = self.map.read().ok().and_then(|m| m.get(&key).copied()) {
            return Ok(k);
        }
        let k = bound_state_kernel(&self.xi, &self.emitter, key as f64 * self.resolution)?;
        if let Ok(mut m) = self.map.write() {
            m.insert(key, k);
        }
        Ok(k)
    }

    pub fn len(&self) -> usize {
        self.map.read().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn guided(&self, omega: f64, omega_prime: f64) -> Result<Complex64> {
        let k = self.kernel(omega + omega_prime)?;
        Ok(channels_at(&self.xi, &self.emitter, omega, omega_prime, k).guided)
    }

    pub fn reservoir(&self, omega: f64, omega_prime: f64, which: ReservoirChannel) -> Result<Complex64> {
        let k = self.kernel(omega + omega_prime)?;
        let ch = channels_at(&self.xi, &self.emitter, omega, omega_prime, k);
        Ok(match which {
            ReservoirChannel::GuidedReservoir => ch.cross,
            ReservoirChannel::ReservoirReservoir => ch.reservoir,
        })
    }
}

/// One node of a two-photon integration.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PairPoint<'a> {
    pub omega: f64,
    pub omega_prime: f64,
    /// ξ(ω, ω′)
    pub xi: Complex64,
    /// ξ(ω′, ω)
    pub xi_swap: Complex64,
    /// K(ω + ω′) for each emitter passed to [`integrate_pairs`].
    pub kernels: &'a [Complex64],
}

/// ∫∫ dω dω′ f over the plane, in the rotated variables E = ω + ω′ and
/// Δ = ω − ω′.
///
/// The inner Δ rule moves with E so that every resonance and every envelope
/// edge stays on a panel boundary, and the bound-state kernels are computed
/// once per E node.
pub(crate) fn integrate_pairs<T, F>(
    xi: &JointEnvelope,
    emitters: &[EmitterParams],
    tolerance: f64,
    f: F,
) -> Result<T>
where
    T: QuadValue,
    F: Fn(&PairPoint) -> T,
{
    check_broadband(xi)?;
    let fa = xi.a().feature().ok_or(Error::MonochromaticEvaluation)?;
    let fb = xi.b().feature().ok_or(Error::MonochromaticEvaluation)?;
    let fe: Vec<Feature> = emitters.iter().map(emitter_feature).collect();

    // Features of the E-marginal: the envelope sum and every emitter pairing.
    let mut sums = vec![Feature {
        position: fa.position + fb.position,
        half_width: fa.half_width + fb.half_width,
        hard: false,
    }];
    for (i, e) in fe.iter().enumerate() {
        for p in [fa, fb].iter().chain(&fe[i..]) {
            sums.push(Feature::soft(e.position + p.position, e.half_width + p.half_width));
        }
    }
    let outer = if fa.hard && fb.hard {
        let (lo_a, hi_a) = (fa.position - fa.half_width, fa.position + fa.half_width);
        let (lo_b, hi_b) = (fb.position - fb.half_width, fb.position + fb.half_width);
        // Corners of the support square: the Δ-extent changes slope there.
        window_spec(lo_a + lo_b, hi_a + hi_b, &sums)
            .with_breakpoints([lo_a + hi_b, hi_a + lo_b, fa.position + fb.position])
    } else {
        line_spec(&sums)
    };
    let outer = outer.with_tolerance(tolerance);
    let kernel_tolerance = 1e-2 * tolerance;

    let integral = integrate_nested(&outer, "scattering", |total, round| {
        let kernels = emitters
            .iter()
            .map(|e| kernel_with_tolerance(xi, e, total, kernel_tolerance))
            .collect::<Result<Vec<_>>>()?;
        // ω = (E + Δ)/2 and ω′ = (E − Δ)/2 put a feature at p in either
        // variable at Δ = ±(2p − E).
        let images: Vec<Feature> = fe
            .iter()
            .chain([&fa, &fb])
            .flat_map(|f| [f.mapped(-total, 2.0), f.mapped(total, -2.0)])
            .collect();
        let rule = line_spec(&images).rule(round);
        let mut acc = T::zero();
        for (delta, w) in rule.iter() {
            let omega = 0.5 * (total + delta);
            let omega_prime = 0.5 * (total - delta);
            let point = PairPoint {
                omega,
                omega_prime,
                xi: xi.amplitude(omega, omega_prime),
                xi_swap: xi.amplitude(omega_prime, omega),
                kernels: &kernels,
            };
            acc.add_scaled(&f(&point), w);
        }
        Ok((acc, rule.len()))
    })?;
    // dω dω′ = ½ dE dΔ
    let mut value = T::zero();
    value.add_scaled(&integral.value, 0.5);
    Ok(value)
}

/// Channel norms of a scattered photon pair, for checking flux conservation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxAudit {
    /// ∫∫|ξ_s|² of the input.
    pub input: f64,
    /// ∫∫|ξ̃|²
    pub guided: f64,
    /// ∫∫|ξ̃ʳ|²
    pub cross: f64,
    /// ∫∫|ξ̃ʳʳ|²
    pub reservoir: f64,
}

impl FluxAudit {
    /// Output norm over input norm; 1 when flux is conserved.
    pub fn ratio(&self) -> f64 {
        (self.guided + 0.5 * self.cross + self.reservoir) / self.input
    }
}

/// Integrates every output channel of a pair scattered by one emitter.
pub fn two_photon_flux(xi: &JointEnvelope, emitter: &EmitterParams, tolerance: f64) -> Result<FluxAudit> {
    let [input, guided, cross, reservoir] =
        integrate_pairs(xi, std::slice::from_ref(emitter), tolerance, |p| {
            let xi_sym = 0.5 * (p.xi + p.xi_swap);
            let ch = pair_channels(
                &ScatterCoeffs::at(p.omega, emitter),
                &ScatterCoeffs::at(p.omega_prime, emitter),
                xi_sym,
                bound_prefactor(emitter, p.kernels[0]),
            );
            [xi_sym.norm_sqr(), ch.guided.norm_sqr(), ch.cross.norm_sqr(), ch.reservoir.norm_sqr()]
        })?;
    Ok(FluxAudit { input, guided, cross, reservoir })
}
