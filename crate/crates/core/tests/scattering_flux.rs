//! Two-photon scattering off one emitter, checked against an independent
//! tangent-mapped product rule and a contour-integral value of K(E).

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use mzient::scattering::{
    bound_state_kernel, scattered_envelope_guided, scattered_envelope_reservoir, two_photon_flux,
    ReservoirChannel, ScatterCoeffs,
};
use mzient::{EmitterParams, JointEnvelope, SpectralProfile};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// K(E) for identical Lorentzian photons, by residues.
fn lorentzian_kernel(center: f64, sigma: f64, e: &EmitterParams, total: f64) -> Complex64 {
    let c = I * (sigma / (2.0 * PI)).sqrt();
    let xi = |w: Complex64| c / (w - center + I * 0.5 * sigma);
    let s = |w: Complex64| e.rate().sqrt() / (w - e.energy() + I * 0.5 * e.total_rate());
    // s(k)ξ(k)ξ(E−k): close above, only ξ(E−k) has a pole there.
    let upper = Complex64::new(total - center, 0.5 * sigma);
    let first = 2.0 * PI * I * s(upper) * xi(upper) * (-c);
    // s(E−k)ξ(k)ξ(E−k): close below, only ξ(k) has a pole there.
    let lower = Complex64::new(center, -0.5 * sigma);
    let second = -2.0 * PI * I * c * s(total - lower) * xi(total - lower);
    first + second
}

#[test]
fn kernel_matches_residue_calculation() {
    for (beta, sigma, center) in [(1.0, 1.0, 0.3), (0.7, 0.2, -0.4), (0.9, 3.0, 1.1)] {
        let e = EmitterParams::new(0.1, 1.3, beta).unwrap();
        let xi = JointEnvelope::identical(SpectralProfile::lorentzian(center, sigma).unwrap());
        for total in [-3.0, 0.0, 0.5, 2.0 * center, 4.0] {
            let got = bound_state_kernel(&xi, &e, total).unwrap();
            let want = lorentzian_kernel(center, sigma, &e, total);
            assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-7 * want.norm().max(1.0));
        }
    }
}

/// Channel amplitudes written out term by term.
struct Channels {
    guided: Complex64,
    cross: Complex64,
    cross_as_printed: Complex64,
    reservoir: Complex64,
}

fn channels(e: &EmitterParams, w: f64, wp: f64, xi: Complex64, xi_swap: Complex64, k: Complex64) -> Channels {
    let a = ScatterCoeffs::at(w, e);
    let b = ScatterCoeffs::at(wp, e);
    let g = e.rate().sqrt() / PI;
    let sum = xi + xi_swap;
    Channels {
        guided: 0.5 * a.t * b.t * sum + 0.5 * I * g * a.s * b.s * k,
        cross: a.t * b.t_r * sum + I * g * a.s * b.s_r * k,
        cross_as_printed: a.t * b.t_r * xi + a.t_r * b.t * xi_swap + g * a.s * b.s_r * k,
        reservoir: 0.5 * a.t_r * b.t_r * sum + 0.5 * I * g * a.s_r * b.s_r * k,
    }
}

#[test]
fn pointwise_channels_match_written_out_form() {
    let e = EmitterParams::new(0.0, 1.0, 0.8).unwrap();
    let xi = JointEnvelope::identical(SpectralProfile::gaussian(0.3, 1.0).unwrap());
    for (w, wp) in [(0.1, 0.4), (-0.5, 1.2), (0.3, 0.3), (2.0, -1.0)] {
        let k = bound_state_kernel(&xi, &e, w + wp).unwrap();
        let x = xi.evaluate(w, wp).unwrap();
        let ch = channels(&e, w, wp, x, xi.evaluate(wp, w).unwrap(), k);
        let guided = scattered_envelope_guided(&xi, &e, w, wp).unwrap();
        let cross = scattered_envelope_reservoir(&xi, &e, w, wp, ReservoirChannel::GuidedReservoir).unwrap();
        let rr = scattered_envelope_reservoir(&xi, &e, w, wp, ReservoirChannel::ReservoirReservoir).unwrap();
        assert_abs_diff_eq!((guided - ch.guided).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((cross - ch.cross).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((rr - ch.reservoir).norm(), 0.0, epsilon = 1e-12);
    }
}

/// [input, guided, cross, cross as printed, reservoir] norms by a midpoint
/// rule in E = ω+ω′ and Δ = ω−ω′, each mapped to (−π/2, π/2) by x = c + s·tanθ.
fn oracle_norms(xi: &JointEnvelope, e: &EmitterParams, center: f64) -> [f64; 5] {
    let (n_total, n_diff) = (800, 2000);
    let mut acc = [0.0; 5];
    for i in 0..n_total {
        let th = -0.5 * PI + PI * (i as f64 + 0.5) / n_total as f64;
        let total = 2.0 * center + 1.5 * th.tan();
        let jt = 1.5 / th.cos().powi(2) * PI / n_total as f64;
        let k = bound_state_kernel(xi, e, total).unwrap();
        for j in 0..n_diff {
            let ph = -0.5 * PI + PI * (j as f64 + 0.5) / n_diff as f64;
            let diff = 2.0 * ph.tan();
            let jd = 2.0 / ph.cos().powi(2) * PI / n_diff as f64;
            let (w, wp) = (0.5 * (total + diff), 0.5 * (total - diff));
            let x = xi.evaluate(w, wp).unwrap();
            let xs = xi.evaluate(wp, w).unwrap();
            let ch = channels(e, w, wp, x, xs, k);
            let weight = 0.5 * jt * jd;
            for (slot, v) in acc.iter_mut().zip([
                (0.5 * (x + xs)).norm_sqr(),
                ch.guided.norm_sqr(),
                ch.cross.norm_sqr(),
                ch.cross_as_printed.norm_sqr(),
                ch.reservoir.norm_sqr(),
            ]) {
                *slot += weight * v;
            }
        }
    }
    acc
}

#[test]
fn corrected_mixed_channel_conserves_flux_and_printed_one_does_not() {
    let e = EmitterParams::new(0.0, 1.0, 0.7).unwrap();
    let xi = JointEnvelope::identical(SpectralProfile::gaussian(0.3, 1.0).unwrap());
    let [input, guided, cross, printed, rr] = oracle_norms(&xi, &e, 0.3);
    assert_abs_diff_eq!(input, 1.0, epsilon = 1e-6);
    let corrected = (guided + 0.5 * cross + rr) / input;
    let as_printed = (guided + 0.5 * printed + rr) / input;
    assert_abs_diff_eq!(corrected, 1.0, epsilon = 1e-4);
    assert!((as_printed - 1.0).abs() > 0.1, "printed form ratio {as_printed}");

    let audit = two_photon_flux(&xi, &e, 1e-8).unwrap();
    assert_abs_diff_eq!(audit.ratio(), 1.0, epsilon = 1e-7);
    assert_abs_diff_eq!(audit.guided, guided, epsilon = 1e-4);
    assert_abs_diff_eq!(audit.cross, cross, epsilon = 1e-4);
    assert_abs_diff_eq!(audit.reservoir, rr, epsilon = 1e-4);
}

#[test]
fn flux_is_conserved_for_every_profile() {
    for beta in [1.0, 0.9, 0.5] {
        let e = EmitterParams::new(0.2, 1.0, beta).unwrap();
        for profile in [
            SpectralProfile::lorentzian(0.0, 0.7).unwrap(),
            SpectralProfile::gaussian(0.5, 2.0).unwrap(),
            SpectralProfile::square(-0.3, 0.4).unwrap(),
        ] {
            let audit = two_photon_flux(&JointEnvelope::identical(profile), &e, 1e-7).unwrap();
            assert_abs_diff_eq!(audit.ratio(), 1.0, epsilon = 1e-6);
            if beta == 1.0 {
                assert_abs_diff_eq!(audit.cross + audit.reservoir, 0.0, epsilon = 1e-15);
            }
        }
    }
}

#[test]
fn flux_is_conserved_for_distinguishable_photons() {
    let e = EmitterParams::new(0.0, 1.0, 0.8).unwrap();
    let xi = JointEnvelope::new(
        SpectralProfile::gaussian(-0.5, 0.8).unwrap(),
        SpectralProfile::gaussian(0.7, 1.5).unwrap(),
    )
    .unwrap();
    let audit = two_photon_flux(&xi, &e, 1e-7).unwrap();
    assert!(audit.input < 1.0);
    assert_abs_diff_eq!(audit.ratio(), 1.0, epsilon = 1e-6);
}
