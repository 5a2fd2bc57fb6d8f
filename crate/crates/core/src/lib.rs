//! Heralded spin-spin entanglement of two spectrally distinct emitters placed
//! in the two arms of a waveguide Mach–Zehnder interferometer.
//!
//! Photons in Fock states are sent through the interferometer; each emitter
//! imprints a spin-dependent scattering phase, and the detector signature
//! heralds a two-qubit spin state. The crate computes those states, their
//! concurrence, the outcome-averaged concurrence, and scans over photon
//! energy and emitter parameters.
//!
//! All energies (transition energies, linewidths, photon energies) are in µeV.

pub mod domain;
pub mod entanglement;
pub mod envelopes;
pub mod error;
pub mod optimizer;
pub mod protocols;
pub mod scattering;

pub use domain::{
    DetectionOutcome, EmitterParams, ProtocolResult, Signature, SystemParams, TwoQubitDensity,
    TwoQubitPure,
};
pub use envelopes::{JointEnvelope, ProfileKind, SpectralProfile};
pub use error::{Error, Result};
pub use protocols::DetectorModel;
