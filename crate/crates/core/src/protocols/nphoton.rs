//! Fock inputs |n, m⟩ of identical monochromatic photons and lossless emitters.
//!
//! With N = n + m, the first splitter maps the input onto
//! Σ_k f_{N,n;k} (u†)^k (d†)^{N−k}|0⟩; scattering multiplies the term by
//! t₁^k when spin 1 is ↑ and by t₂^{N−k} when spin 2 is ↑; the second splitter
//! maps (u†)^k (d†)^{N−k} onto Σ_p g_{N,k;p} (u†)^p (d†)^{N−p}.

use num_complex::Complex64;

use crate::domain::{DetectionOutcome, ProtocolResult, RunInfo, Signature, SystemParams};
use crate::error::{Error, Result};
use crate::scattering::transmission;

/// Largest photon number accepted by [`n_photon_monochromatic`].
pub const DEFAULT_PHOTON_CAP: u32 = 12;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn sign(power: u32) -> f64 {
    if power.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Splitter coefficient tables for N photons, n of them in the upper arm.
#[derive(Debug, Clone, PartialEq)]
pub struct NPhotonCoeffs {
    total: u32,
    upper: u32,
    f: Vec<f64>,
    g: Vec<Vec<f64>>,
}

/// Exact binomial sums for f_{N,n;k} and g_{N,k;p}.
pub fn coefficient_tables(total: u32, upper: u32) -> Result<NPhotonCoeffs> {
    if total == 0 || upper > total {
        return Err(Error::param(format!("invalid photon numbers N={total}, n={upper}")));
    }
    if total > DEFAULT_PHOTON_CAP {
        return Err(Error::Resource(format!(
            "{total} photons exceed the cap of {DEFAULT_PHOTON_CAP}"
        )));
    }
    let lower = total - upper;
    let scale = 2f64.powf(-0.5 * total as f64);
    let prefactor = scale / (factorial(upper) * factorial(lower)).sqrt();
    let f = (0..=total)
        .map(|k| {
            let sum: f64 = (0..=upper.min(k))
                .map(|k1| sign(k - k1) * binomial(upper, k1) * binomial(lower, k - k1))
                .sum();
            prefactor * sum
        })
        .collect();
    let g = (0..=total)
        .map(|k| {
            (0..=total)
                .map(|p| {
                    let sum: f64 = (0..=k.min(p))
                        .map(|p1| sign(k - p1) * binomial(k, p1) * binomial(total - k, p - p1))
                        .sum();
                    scale * sum
                })
                .collect()
        })
        .collect();
    Ok(NPhotonCoeffs { total, upper, f, g })
}

impl NPhotonCoeffs {
    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn upper(&self) -> u32 {
        self.upper
    }

    /// f_{N,n;k}: weight of (u†)^k (d†)^{N−k} after the first splitter.
    pub fn f(&self, k: u32) -> f64 {
        self.f[k as usize]
    }

    /// g_{N,k;p}: weight of (u†)^p (d†)^{N−p} from (u†)^k (d†)^{N−k}.
    pub fn g(&self, k: u32, p: u32) -> f64 {
        self.g[k as usize][p as usize]
    }

    /// c_p for every p = 0..=N, in the spin basis (↑↑, ↑↓, ↓↑, ↓↓), for
    /// transmissions `t1` and `t2`.
    pub fn spin_coefficients(&self, t1: Complex64, t2: Complex64) -> Vec<[Complex64; 4]> {
        let n = self.total;
        let one = Complex64::new(1.0, 0.0);
        (0..=n)
            .map(|p| {
                let mut c = [Complex64::new(0.0, 0.0); 4];
                for k in 0..=n {
                    let w = 0.5 * self.f(k) * self.g(k, p);
                    if w == 0.0 {
                        continue;
                    }
                    let a = t1.powu(k);
                    let b = t2.powu(n - k);
                    for (ci, phase) in c.iter_mut().zip([a * b, a, b, one]) {
                        *ci += phase * w;
                    }
                }
                c
            })
            .collect()
    }
}

/// |n, m⟩ at photon energy `omega`, with the default photon cap.
pub fn n_photon_monochromatic(n: u32, m: u32, sys: &SystemParams, omega: f64) -> Result<ProtocolResult> {
    n_photon_monochromatic_capped(n, m, sys, omega, DEFAULT_PHOTON_CAP)
}

pub fn n_photon_monochromatic_capped(
    n: u32,
    m: u32,
    sys: &SystemParams,
    omega: f64,
    cap: u32,
) -> Result<ProtocolResult> {
    let total = n + m;
    if total > cap.min(DEFAULT_PHOTON_CAP) {
        return Err(Error::Resource(format!("{total} photons exceed the cap of {cap}")));
    }
    if !sys.is_lossless() {
        return Err(Error::Unsupported(format!(
            "|{n},{m}⟩ runs are only modelled for lossless emitters (beta = 1)"
        )));
    }
    if !omega.is_finite() {
        return Err(Error::param(format!("photon energy must be finite, got {omega}")));
    }
    let tables = coefficient_tables(total, n)?;
    let t1 = transmission(omega, &sys.emitter1);
    let t2 = transmission(omega, &sys.emitter2);
    let outcomes = tables
        .spin_coefficients(t1, t2)
        .into_iter()
        .enumerate()
        .map(|(p, c)| {
            let p = p as u32;
            let weight = factorial(p) * factorial(total - p);
            let probability = weight * c.iter().map(|a| a.norm_sqr()).sum::<f64>();
            DetectionOutcome::pure(Signature::new(p, total - p), probability, c)
        })
        .collect::<Result<Vec<_>>>()?;
    ProtocolResult::new(
        outcomes,
        RunInfo {
            photons: (n, m),
            envelope: format!("monochromatic(omega={omega})"),
            detector: "nr".into(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn single_photon_splits_evenly() {
        let t = coefficient_tables(1, 1).unwrap();
        assert_abs_diff_eq!(t.f(0), FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(t.f(1), FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn pair_has_no_coincidence_term() {
        let t = coefficient_tables(2, 1).unwrap();
        assert_eq!(t.f(1), 0.0);
    }

    #[test]
    fn all_lower_arm_splitting() {
        for n in 1..=8 {
            let t = coefficient_tables(n, 0).unwrap();
            for p in 0..=n {
                let expected = binomial(n, p) * 2f64.powf(-0.5 * n as f64);
                assert_abs_diff_eq!(t.g(0, p), expected, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn input_norm() {
        for n in 1..=8 {
            for up in 0..=n {
                let t = coefficient_tables(n, up).unwrap();
                let norm: f64 =
                    (0..=n).map(|k| factorial(k) * factorial(n - k) * t.f(k).powi(2)).sum();
                assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn limits() {
        assert!(matches!(coefficient_tables(13, 1), Err(Error::Resource(_))));
        assert!(coefficient_tables(2, 3).is_err());
        let sys = SystemParams::from_detuning(0.0, 1.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            n_photon_monochromatic_capped(3, 3, &sys, 0.0, 4),
            Err(Error::Resource(_))
        ));
        let lossy = SystemParams::from_detuning(0.0, 1.0, 0.9, 0.0, 1.0, 1.0).unwrap();
        assert!(matches!(n_photon_monochromatic(2, 1, &lossy, 0.0), Err(Error::Unsupported(_))));
    }
}
