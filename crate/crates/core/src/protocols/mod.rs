//! Interferometer runs for single-photon, photon-pair and N-photon Fock inputs.
//!
//! Conventions shared by every pipeline:
//!
//! * Both spins start in (|↑⟩ + |↓⟩)/√2 and only |↑⟩ couples to the photons.
//! * Emitter 1 sits in the upper arm (u), emitter 2 in the lower arm (d).
//! * First splitter: u† → (u† + d†)/√2, d† → (d† − u†)/√2.
//! * Second splitter: u† → (u† − d†)/√2, d† → (u† + d†)/√2.
//! * Detector D₁ sits on the upper output; signature (p, q) counts p photons
//!   at D₁ and q at D₂.

mod nphoton;
mod single;
mod two;

use std::fmt;
use std::str::FromStr;

use crate::domain::{ProtocolResult, SystemParams};
use crate::error::{Error, Result};

pub use nphoton::{
    coefficient_tables, n_photon_monochromatic, n_photon_monochromatic_capped, NPhotonCoeffs,
    DEFAULT_PHOTON_CAP,
};
pub use single::{single_photon_broadband, single_photon_monochromatic};
pub use two::{
    coarse_grain, two_photon_broadband, two_photon_broadband_with_tolerance, two_photon_monochromatic,
    two_photon_monochromatic_identical, DEFAULT_PAIR_TOLERANCE,
};

/// How the detectors report photon numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DetectorModel {
    /// Resolves 0, 1 and 2 photons.
    #[default]
    NumberResolving,
    /// Only clicks: one and two photons at the same detector look alike.
    NonNumberResolving,
}

impl DetectorModel {
    pub fn name(&self) -> &'static str {
        match self {
            DetectorModel::NumberResolving => "nr",
            DetectorModel::NonNumberResolving => "nnr",
        }
    }
}

impl fmt::Display for DetectorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "nr" | "numberresolving" => Ok(DetectorModel::NumberResolving),
            "nnr" | "nonnumberresolving" | "click" => Ok(DetectorModel::NonNumberResolving),
            other => Err(Error::param(format!("unknown detector model '{other}'"))),
        }
    }
}

/// Monochromatic run of the Fock input |n, m⟩ at photon energy `omega`,
/// dispatched to the dedicated single- or two-photon path when one exists.
pub fn fock_monochromatic(
    n: u32,
    m: u32,
    sys: &SystemParams,
    omega: f64,
    detector: DetectorModel,
) -> Result<ProtocolResult> {
    match (n, m) {
        (1, 0) => single_photon_monochromatic(sys, omega),
        (1, 1) => two_photon_monochromatic(sys, omega, detector),
        _ => n_photon_monochromatic(n, m, sys, omega),
    }
}

/// Rejects combinations no pipeline can run, before any work is done.
pub fn check_fock_input(n: u32, m: u32, sys: &SystemParams) -> Result<()> {
    let total = n + m;
    if total == 0 {
        return Err(Error::param("the input must contain at least one photon"));
    }
    if total > DEFAULT_PHOTON_CAP {
        return Err(Error::Resource(format!(
            "{total} photons exceed the cap of {DEFAULT_PHOTON_CAP}"
        )));
    }
    let dedicated = matches!((n, m), (1, 0) | (1, 1));
    if !dedicated && !sys.is_lossless() {
        return Err(Error::Unsupported(format!(
            "|{n},{m}⟩ is only modelled for lossless emitters (beta = 1)"
        )));
    }
    Ok(())
}
