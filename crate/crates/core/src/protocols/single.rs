use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::domain::{outer, DetectionOutcome, ProtocolResult, RunInfo, Signature, SystemParams};
use crate::envelopes::quadrature::integrate_1d;
use crate::envelopes::{line_spec, window_spec, Feature, SpectralProfile};
use crate::error::{Error, Result};
use crate::scattering::ScatterCoeffs;

const TOLERANCE: f64 = 1e-9;

/// Spin amplitudes for the (1,0) and (0,1) clicks and for loss into either
/// reservoir, with the photon entering the upper arm at energy `omega`.
fn branches(sys: &SystemParams, omega: f64) -> [[Complex64; 4]; 4] {
    let c1 = ScatterCoeffs::at(omega, &sys.emitter1);
    let c2 = ScatterCoeffs::at(omega, &sys.emitter2);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let q = 0.25;
    let r = 0.25 * std::f64::consts::SQRT_2;
    [
        [(c1.t + c2.t) * q, (c1.t + one) * q, (one + c2.t) * q, one * 0.5],
        [(c2.t - c1.t) * q, (one - c1.t) * q, (c2.t - one) * q, zero],
        [c1.t_r * r, c1.t_r * r, zero, zero],
        [c2.t_r * r, zero, c2.t_r * r, zero],
    ]
}

fn info(envelope: String) -> RunInfo {
    RunInfo { photons: (1, 0), envelope, detector: "any".into() }
}

/// One photon of energy `omega` sent into the upper arm.
pub fn single_photon_monochromatic(sys: &SystemParams, omega: f64) -> Result<ProtocolResult> {
    if !omega.is_finite() {
        return Err(Error::param(format!("photon energy must be finite, got {omega}")));
    }
    let [up, down, loss1, loss2] = branches(sys, omega);
    let norm = |v: &[Complex64; 4]| v.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let mut outcomes = vec![
        DetectionOutcome::pure(Signature::new(1, 0), norm(&up), up)?,
        DetectionOutcome::pure(Signature::new(0, 1), norm(&down), down)?,
    ];
    if !sys.is_lossless() {
        // The two reservoirs are distinct modes, so the branches mix incoherently.
        outcomes.push(DetectionOutcome::from_unnormalized(
            Signature::new(0, 0),
            outer(&loss1) + outer(&loss2),
        )?);
    }
    ProtocolResult::new(outcomes, info(format!("monochromatic(omega={omega})")))
}

/// One photon with spectral amplitude `profile` sent into the upper arm.
pub fn single_photon_broadband(sys: &SystemParams, profile: &SpectralProfile) -> Result<ProtocolResult> {
    if profile.is_monochromatic() {
        return single_photon_monochromatic(sys, profile.center());
    }
    let mut features: Vec<Feature> =
        sys.emitters().iter().map(|e| Feature::soft(e.energy(), 0.5 * e.total_rate())).collect();
    features.extend(profile.feature());
    let spec = match profile.support() {
        Some((lo, hi)) => window_spec(lo, hi, &features),
        None => line_spec(&features),
    }
    .with_tolerance(TOLERANCE);
    let lossy = !sys.is_lossless();
    let acc: [Matrix4<Complex64>; 3] = integrate_1d(
        |omega| {
            let weight = Complex64::new(profile.amplitude(omega).norm_sqr(), 0.0);
            let [up, down, loss1, loss2] = branches(sys, omega);
            let lost = if lossy { outer(&loss1) + outer(&loss2) } else { Matrix4::zeros() };
            [outer(&up) * weight, outer(&down) * weight, lost * weight]
        },
        &spec,
    )
    .map_err(|e| match e {
        Error::Quadrature { rounds, previous, last, change, .. } => {
            Error::Quadrature { module: "protocols", rounds, previous, last, change }
        }
        other => other,
    })?
    .value;
    let [up, down, lost] = acc;
    let mut outcomes = vec![
        DetectionOutcome::from_unnormalized(Signature::new(1, 0), up)?,
        DetectionOutcome::from_unnormalized(Signature::new(0, 1), down)?,
    ];
    if lossy {
        outcomes.push(DetectionOutcome::from_unnormalized(Signature::new(0, 0), lost)?);
    }
    ProtocolResult::new(outcomes, info(profile.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn resonant_identical_emitters() {
        let sys = SystemParams::from_detuning(0.0, 1.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let r = single_photon_monochromatic(&sys, 0.0).unwrap();
        assert_abs_diff_eq!(r.probability(Signature::new(1, 0)), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.probability(Signature::new(0, 1)), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.c_avg, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn midpoint_gives_half() {
        let sys = SystemParams::from_detuning(0.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let r = single_photon_monochromatic(&sys, 0.5).unwrap();
        assert_abs_diff_eq!(r.c_avg, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn loss_outcome_takes_the_remainder() {
        let sys = SystemParams::from_detuning(0.0, 1.0, 0.8, 0.7, 1.4, 0.6).unwrap();
        let r = single_photon_monochromatic(&sys, 0.2).unwrap();
        let lost = r.probability(Signature::new(0, 0));
        let rest = 1.0 - r.probability(Signature::new(1, 0)) - r.probability(Signature::new(0, 1));
        assert_abs_diff_eq!(lost, rest, epsilon = 1e-14);
        assert_eq!(r.outcomes.len(), 3);
    }
}
