//! Photon pairs: one photon per input arm.
//!
//! After the first splitter the pair is (|2,0⟩ − |0,2⟩)/√2 for identical
//! photons plus an exchange-odd |1,1⟩ part ∝ δξ = ξ(ω,ω′) − ξ(ω′,ω) for
//! distinguishable ones. Scattering fills ten channels (uu, dd, ud, ur₁, ur₂,
//! r₁d, dr₂, r₁r₁, r₁r₂, r₂r₂ with rᵢ the reservoir of emitter i), and the
//! second splitter recombines the guided ones before detection.

use nalgebra::Matrix4;
use num_complex::Complex64;

use super::DetectorModel;
use crate::domain::{outer, DetectionOutcome, ProtocolResult, RunInfo, Signature, SystemParams};
use crate::envelopes::JointEnvelope;
use crate::error::{Error, Result};
use crate::scattering::{bound_prefactor, integrate_pairs, pair_channels, ScatterCoeffs};

/// Relative tolerance of the two-dimensional frequency integrals.
pub const DEFAULT_PAIR_TOLERANCE: f64 = 1e-7;

/// Signatures in the order of [`Operators`].
const SIGNATURES: [Signature; 6] = [
    Signature::new(2, 0),
    Signature::new(0, 2),
    Signature::new(1, 1),
    Signature::new(1, 0),
    Signature::new(0, 1),
    Signature::new(0, 0),
];

/// Unnormalized heralded operators, one per signature.
type Operators = [Matrix4<Complex64>; 6];

type Spin = [Complex64; 4];

fn add(a: &Spin, b: &Spin, wa: f64, wb: f64) -> Spin {
    std::array::from_fn(|i| a[i] * wa + b[i] * wb)
}

/// Heralded operators at one (ω, ω′) node.
///
/// `c1w`/`c1wp` are emitter 1 coefficients at ω/ω′ (likewise for emitter 2),
/// `xi`/`xi_swap` are ξ(ω,ω′) and ξ(ω′,ω), and `bound1`/`bound2` the
/// bound-state prefactors at E = ω + ω′.
#[allow(clippy::too_many_arguments)]
fn operators_at(
    c1w: &ScatterCoeffs,
    c1wp: &ScatterCoeffs,
    c2w: &ScatterCoeffs,
    c2wp: &ScatterCoeffs,
    xi: Complex64,
    xi_swap: Complex64,
    bound1: Complex64,
    bound2: Complex64,
    lossy: bool,
) -> Operators {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let q = 0.25;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let xs = 0.5 * (xi + xi_swap);
    let dxi = xi - xi_swap;
    let e1 = pair_channels(c1w, c1wp, xs, bound1);
    let e2 = pair_channels(c2w, c2wp, xs, bound2);

    // State after scattering, before the second splitter.
    let uu3 = [-e1.guided * q, -e1.guided * q, -xs * q, -xs * q];
    let dd3 = [e2.guided * q, xs * q, e2.guided * q, xs * q];
    let ud3 = [c1w.t * c2wp.t, c1w.t, c2wp.t, one].map(|x| x * dxi * q);
    // ud₃(ω′, ω), using δξ(ω′, ω) = −δξ(ω, ω′).
    let ud3_sw = [c1wp.t * c2w.t, c1wp.t, c2w.t, one].map(|x| -x * dxi * q);

    let mut ops: Operators = std::array::from_fn(|_| Matrix4::zeros());
    let sym = add(&uu3, &dd3, 0.5, 0.5);
    let ud_sum = add(&ud3, &ud3_sw, 0.25, 0.25);
    let uu4 = add(&sym, &ud_sum, 1.0, 1.0);
    let dd4 = add(&sym, &ud_sum, 1.0, -1.0);
    let ud4 = add(&add(&dd3, &uu3, 1.0, -1.0), &add(&ud3, &ud3_sw, 0.5, -0.5), 1.0, 1.0);
    ops[0] = outer(&uu4) * Complex64::new(2.0, 0.0);
    ops[1] = outer(&dd4) * Complex64::new(2.0, 0.0);
    ops[2] = outer(&ud4);

    if lossy {
        let ur1 = [-e1.cross * q, -e1.cross * q, zero, zero];
        let ur1_sw = [-e1.cross_swapped * q, -e1.cross_swapped * q, zero, zero];
        let r1d = [c1w.t_r * c2wp.t, c1w.t_r, zero, zero].map(|x| x * dxi * q);
        let r1d_sw = [c1wp.t_r * c2w.t, c1wp.t_r, zero, zero].map(|x| -x * dxi * q);
        let ur2 = [c1w.t * c2wp.t_r, zero, c2wp.t_r, zero].map(|x| x * dxi * q);
        let dr2 = [e2.cross * q, zero, e2.cross * q, zero];
        let r1r1 = [-e1.reservoir * q, -e1.reservoir * q, zero, zero];
        let r1r2 = [c1w.t_r * c2wp.t_r * dxi * q, zero, zero, zero];
        let r2r2 = [e2.reservoir * q, zero, e2.reservoir * q, zero];

        let ur1_4 = add(&ur1, &r1d_sw, h, h);
        let r1d_4 = add(&ur1_sw, &r1d, -h, h);
        let ur2_4 = add(&ur2, &dr2, h, h);
        let dr2_4 = add(&ur2, &dr2, -h, h);
        let two = Complex64::new(2.0, 0.0);
        ops[3] = outer(&ur1_4) + outer(&ur2_4);
        ops[4] = outer(&r1d_4) + outer(&dr2_4);
        ops[5] = outer(&r1r1) * two + outer(&r1r2) + outer(&r2r2) * two;
    }
    ops
}

fn outcomes_for(ops: Operators, detector: DetectorModel) -> Result<Vec<DetectionOutcome>> {
    match detector {
        DetectorModel::NumberResolving => SIGNATURES
            .iter()
            .zip(ops)
            .map(|(&sig, m)| DetectionOutcome::from_unnormalized(sig, m))
            .collect(),
        DetectorModel::NonNumberResolving => {
            let [m20, m02, m11, m10, m01, m00] = ops;
            vec![
                DetectionOutcome::from_unnormalized(Signature::new(1, 1), m11),
                DetectionOutcome::from_unnormalized(Signature::new(1, 0), m20 + m10),
                DetectionOutcome::from_unnormalized(Signature::new(0, 1), m02 + m01),
                DetectionOutcome::from_unnormalized(Signature::new(0, 0), m00),
            ]
            .into_iter()
            .collect()
        }
    }
}

/// Non-number-resolving view of a number-resolving pair run: (2,0) merges
/// into (1,0) and (0,2) into (0,1).
pub fn coarse_grain(result: &ProtocolResult) -> Result<ProtocolResult> {
    if result.info.photons != (1, 1) || result.info.detector != DetectorModel::NumberResolving.name() {
        return Err(Error::Unsupported(format!(
            "only number-resolving pair runs can be coarse-grained, got {:?} with '{}'",
            result.info.photons, result.info.detector
        )));
    }
    let operator = |p, q| {
        result.outcome(Signature::new(p, q)).and_then(|o| {
            o.state.as_ref().map(|s| s.matrix() * Complex64::new(o.probability, 0.0))
        })
        .unwrap_or_else(Matrix4::zeros)
    };
    let ops: Operators = std::array::from_fn(|i| operator(SIGNATURES[i].p, SIGNATURES[i].q));
    let detector = DetectorModel::NonNumberResolving;
    ProtocolResult::new(
        outcomes_for(ops, detector)?,
        RunInfo { detector: detector.name().into(), ..result.info.clone() },
    )
}

fn info(envelope: String, detector: DetectorModel) -> RunInfo {
    RunInfo { photons: (1, 1), envelope, detector: detector.name().into() }
}

/// Identical monochromatic photons and lossless emitters, where only the
/// linear scattering survives and every outcome is a pure state.
pub fn two_photon_monochromatic_identical(sys: &SystemParams, omega: f64) -> Result<ProtocolResult> {
    if !sys.is_lossless() {
        return Err(Error::Unsupported(
            "the closed-form pair path assumes beta = 1; use two_photon_monochromatic or the broadband path"
                .into(),
        ));
    }
    if !omega.is_finite() {
        return Err(Error::param(format!("photon energy must be finite, got {omega}")));
    }
    let t1 = ScatterCoeffs::at(omega, &sys.emitter1).t.powi(2);
    let t2 = ScatterCoeffs::at(omega, &sys.emitter2).t.powi(2);
    let one = Complex64::new(1.0, 0.0);
    let bunched = [t2 - t1, one - t1, t2 - one, Complex64::new(0.0, 0.0)];
    let split = [t1 + t2, t1 + one, one + t2, 2.0 * one];
    let p_bunched = bunched.iter().map(|a| a.norm_sqr()).sum::<f64>() / 32.0;
    let p_split = split.iter().map(|a| a.norm_sqr()).sum::<f64>() / 16.0;
    let outcomes = vec![
        DetectionOutcome::pure(Signature::new(2, 0), p_bunched, bunched)?,
        DetectionOutcome::pure(Signature::new(0, 2), p_bunched, bunched)?,
        DetectionOutcome::pure(Signature::new(1, 1), p_split, split)?,
    ];
    ProtocolResult::new(
        outcomes,
        info(format!("monochromatic(omega={omega})"), DetectorModel::NumberResolving),
    )
}

/// Identical monochromatic photons with arbitrary β: the closed form when both
/// emitters are lossless, otherwise the pair operators at the single frequency
/// with the bound state removed.
pub fn two_photon_monochromatic(
    sys: &SystemParams,
    omega: f64,
    detector: DetectorModel,
) -> Result<ProtocolResult> {
    if sys.is_lossless() {
        return two_photon_monochromatic_identical(sys, omega);
    }
    if !omega.is_finite() {
        return Err(Error::param(format!("photon energy must be finite, got {omega}")));
    }
    let c1 = ScatterCoeffs::at(omega, &sys.emitter1);
    let c2 = ScatterCoeffs::at(omega, &sys.emitter2);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let ops = operators_at(&c1, &c1, &c2, &c2, one, one, zero, zero, true);
    ProtocolResult::new(
        outcomes_for(ops, detector)?,
        info(format!("monochromatic(omega={omega})"), detector),
    )
}

/// A photon pair with joint amplitude ξ(ω, ω′) = ξ_a(ω)ξ_b(ω′).
pub fn two_photon_broadband(
    sys: &SystemParams,
    xi: &JointEnvelope,
    detector: DetectorModel,
) -> Result<ProtocolResult> {
    two_photon_broadband_with_tolerance(sys, xi, detector, DEFAULT_PAIR_TOLERANCE)
}

pub fn two_photon_broadband_with_tolerance(
    sys: &SystemParams,
    xi: &JointEnvelope,
    detector: DetectorModel,
    tolerance: f64,
) -> Result<ProtocolResult> {
    if xi.is_monochromatic() {
        if xi.a().center() != xi.b().center() {
            return Err(Error::Unsupported(
                "monochromatic photon pairs must share one energy".into(),
            ));
        }
        return two_photon_monochromatic(sys, xi.a().center(), detector);
    }
    let lossy = !sys.is_lossless();
    let emitters = [sys.emitter1, sys.emitter2];
    let ops: Operators = integrate_pairs(xi, &emitters, tolerance, |p| {
        let c1w = ScatterCoeffs::at(p.omega, &sys.emitter1);
        let c1wp = ScatterCoeffs::at(p.omega_prime, &sys.emitter1);
        let c2w = ScatterCoeffs::at(p.omega, &sys.emitter2);
        let c2wp = ScatterCoeffs::at(p.omega_prime, &sys.emitter2);
        operators_at(
            &c1w,
            &c1wp,
            &c2w,
            &c2wp,
            p.xi,
            p.xi_swap,
            bound_prefactor(&sys.emitter1, p.kernels[0]),
            bound_prefactor(&sys.emitter2, p.kernels[1]),
            lossy,
        )
    })
    .map_err(|e| match e {
        Error::Quadrature { rounds, previous, last, change, .. } => {
            Error::Quadrature { module: "protocols", rounds, previous, last, change }
        }
        other => other,
    })?;
    let envelope = if xi.is_exchange_symmetric() {
        xi.a().to_string()
    } else {
        format!("{} x {}", xi.a(), xi.b())
    };
    ProtocolResult::new(outcomes_for(ops, detector)?, info(envelope, detector))
}
