//! Physical parameters, unit conventions and two-qubit state containers.
//!
//! Every energy-like quantity (transition energies, detunings, linewidths and
//! photon energies) is stored in µeV with ħ = 1, so a rate Γ is kept as the
//! energy ħΓ. Nanoseconds only appear in [`lifetime_from_linewidth`].
//!
//! Spin amplitudes use the fixed basis order (↑↑, ↑↓, ↓↑, ↓↓); the first
//! factor is the emitter in the upper interferometer arm.

use std::fmt;

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::entanglement;
use crate::error::{Error, Result};

/// ħ in µeV·ns.
pub const HBAR_UEV_NS: f64 = 0.658_211_956_9;

/// Labels of the spin basis, in storage order.
pub const BASIS_LABELS: [&str; 4] = ["↑↑", "↑↓", "↓↑", "↓↓"];

/// Below this probability an outcome is kept in the ledger but carries no state.
pub const NULL_OUTCOME_PROBABILITY: f64 = 1e-15;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

/// Loss rate γ = Γ(1−β)/β for waveguide rate `rate` and coupling fraction `beta`.
pub fn gamma_from_beta(rate: f64, beta: f64) -> Result<f64> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::param(format!("waveguide rate must be positive, got {rate}")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::param(format!("beta must lie in (0, 1], got {beta}")));
    }
    Ok(rate * (1.0 - beta) / beta)
}

/// Radiative lifetime in ns for a linewidth given in µeV.
pub fn lifetime_from_linewidth(rate: f64) -> Result<f64> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::param(format!("linewidth must be positive, got {rate}")));
    }
    Ok(HBAR_UEV_NS / rate)
}

/// A single L-type emitter coupled to one interferometer arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterParams {
    energy: f64,
    rate: f64,
    beta: f64,
}

impl EmitterParams {
    /// `energy` is the transition energy E, `rate` the unidirectional emission
    /// rate into the waveguide ħΓ, `beta` = Γ/(Γ+γ).
    pub fn new(energy: f64, rate: f64, beta: f64) -> Result<Self> {
        if !energy.is_finite() {
            return Err(Error::param(format!("transition energy must be finite, got {energy}")));
        }
        gamma_from_beta(rate, beta)?;
        Ok(Self { energy, rate, beta })
    }

    pub fn lossless(energy: f64, rate: f64) -> Result<Self> {
        Self::new(energy, rate, 1.0)
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// ħΓ, the emission rate into the guided mode.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// ħγ, the emission rate into non-guided modes.
    pub fn loss_rate(&self) -> f64 {
        self.rate * (1.0 - self.beta) / self.beta
    }

    /// ħ(Γ+γ).
    pub fn total_rate(&self) -> f64 {
        self.rate + self.loss_rate()
    }

    pub fn is_lossless(&self) -> bool {
        self.beta == 1.0
    }

    pub fn shifted(&self, offset: f64) -> Self {
        Self { energy: self.energy + offset, ..*self }
    }

    /// Multiplies every energy scale (E and Γ) by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { energy: self.energy * factor, rate: self.rate * factor, beta: self.beta }
    }
}

/// The emitter pair: emitter 1 sits in the upper arm, emitter 2 in the lower arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub emitter1: EmitterParams,
    pub emitter2: EmitterParams,
}

impl SystemParams {
    pub fn new(emitter1: EmitterParams, emitter2: EmitterParams) -> Self {
        Self { emitter1, emitter2 }
    }

    /// Builds the pair from E₁, Γ₁, β₁ and the detuning δ = E₂ − E₁.
    pub fn from_detuning(
        energy1: f64,
        rate1: f64,
        beta1: f64,
        detuning: f64,
        rate2: f64,
        beta2: f64,
    ) -> Result<Self> {
        Ok(Self {
            emitter1: EmitterParams::new(energy1, rate1, beta1)?,
            emitter2: EmitterParams::new(energy1 + detuning, rate2, beta2)?,
        })
    }

    /// δ = E₂ − E₁.
    pub fn detuning(&self) -> f64 {
        self.emitter2.energy - self.emitter1.energy
    }

    /// (E₁ + E₂)/2.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.emitter1.energy + self.emitter2.energy)
    }

    pub fn max_rate(&self) -> f64 {
        self.emitter1.rate.max(self.emitter2.rate)
    }

    pub fn is_lossless(&self) -> bool {
        self.emitter1.is_lossless() && self.emitter2.is_lossless()
    }

    pub fn emitters(&self) -> [&EmitterParams; 2] {
        [&self.emitter1, &self.emitter2]
    }

    pub fn swapped(&self) -> Self {
        Self { emitter1: self.emitter2, emitter2: self.emitter1 }
    }

    pub fn shifted(&self, offset: f64) -> Self {
        Self { emitter1: self.emitter1.shifted(offset), emitter2: self.emitter2.shifted(offset) }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { emitter1: self.emitter1.scaled(factor), emitter2: self.emitter2.scaled(factor) }
    }
}

/// Four spin amplitudes in the order (↑↑, ↑↓, ↓↑, ↓↓).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitPure([Complex64; 4]);

impl TwoQubitPure {
    /// Stores the amplitudes as given, without normalizing.
    pub fn new(amplitudes: [Complex64; 4]) -> Self {
        Self(amplitudes)
    }

    /// Rescales the amplitudes to unit norm.
    pub fn normalized(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState {
                module: "domain",
                detail: format!("cannot normalize a state of norm {norm}"),
            });
        }
        Ok(Self(amplitudes.map(|a| a / norm)))
    }

    pub fn from_real(amplitudes: [f64; 4]) -> Result<Self> {
        Self::normalized(amplitudes.map(|a| Complex64::new(a, 0.0)))
    }

    /// Product state (a₀|↑⟩ + a₁|↓⟩) ⊗ (b₀|↑⟩ + b₁|↓⟩), normalized.
    pub fn product(first: [Complex64; 2], second: [Complex64; 2]) -> Result<Self> {
        Self::normalized([
            first[0] * second[0],
            first[0] * second[1],
            first[1] * second[0],
            first[1] * second[1],
        ])
    }

    /// (↑↑ − ↓↓)/√2
    pub fn phi_minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self([h.into(), 0.0.into(), 0.0.into(), (-h).into()])
    }

    /// (↑↓ − ↓↑)/√2
    pub fn psi_minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self([0.0.into(), h.into(), (-h).into(), 0.0.into()])
    }

    pub fn up_up() -> Self {
        Self([1.0.into(), 0.0.into(), 0.0.into(), 0.0.into()])
    }

    pub fn down_down() -> Self {
        Self([0.0.into(), 0.0.into(), 0.0.into(), 1.0.into()])
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    /// |φ⟩⟨φ|
    pub fn projector(&self) -> Matrix4<Complex64> {
        outer(&self.0)
    }
}

/// |v⟩⟨v| for an unnormalized spin vector.
pub(crate) fn outer(v: &[Complex64; 4]) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| v[i] * v[j].conj())
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDensity(Matrix4<Complex64>);

impl TwoQubitDensity {
    /// Accepts `matrix` only if it is Hermitian, unit-trace and positive semidefinite.
    pub fn new(matrix: Matrix4<Complex64>) -> Result<Self> {
        validate_density(&matrix)?;
        Ok(Self(matrix))
    }

    /// Hermitizes and trace-normalizes an accumulated (unnormalized) density
    /// operator before validating it.
    pub fn from_unnormalized(matrix: Matrix4<Complex64>) -> Result<Self> {
        let herm = (matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let trace = herm.trace().re;
        if !(trace.is_finite() && trace > 0.0) {
            return Err(Error::InvalidState {
                module: "domain",
                detail: format!("density operator has non-positive trace {trace:e}"),
            });
        }
        Self::new(herm / Complex64::new(trace, 0.0))
    }

    pub fn pure(state: &TwoQubitPure) -> Result<Self> {
        Self::from_unnormalized(state.projector())
    }

    pub fn maximally_mixed() -> Self {
        Self(Matrix4::identity() * Complex64::new(0.25, 0.0))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix4<Complex64> {
        self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    /// Probability-weighted mixture Σ pᵢρᵢ / Σ pᵢ.
    pub fn mixture(parts: &[(f64, &TwoQubitDensity)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) {
            return Err(Error::param("mixture weights must be finite and non-negative"));
        }
        if total <= 0.0 {
            return Err(Error::DegenerateMixture);
        }
        let acc = parts
            .iter()
            .fold(Matrix4::zeros(), |acc, (w, rho)| acc + rho.0 * Complex64::new(*w, 0.0));
        Self::from_unnormalized(acc)
    }
}

fn validate_density(m: &Matrix4<Complex64>) -> Result<()> {
    let invalid = |detail: String| Error::InvalidState { module: "domain", detail };
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(invalid("density matrix has non-finite entries".into()));
    }
    let asym = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if asym > HERMITIAN_TOL {
        return Err(invalid(format!("density matrix is not Hermitian (deviation {asym:e})")));
    }
    let trace = m.trace();
    if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
        return Err(invalid(format!("density matrix trace is {trace}")));
    }
    let min_ev = SymmetricEigen::new(*m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_ev < -PSD_TOL {
        return Err(invalid(format!("density matrix has negative eigenvalue {min_ev:e}")));
    }
    Ok(())
}

/// Σ wᵢ|φᵢ⟩⟨φᵢ| / Σ wᵢ.
pub fn density_from_pure_mixture(entries: &[(f64, TwoQubitPure)]) -> Result<TwoQubitDensity> {
    if entries.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) {
        return Err(Error::param("mixture weights must be finite and non-negative"));
    }
    let total: f64 = entries.iter().map(|(w, _)| *w).sum();
    if total <= 0.0 {
        return Err(Error::DegenerateMixture);
    }
    let acc = entries.iter().fold(Matrix4::zeros(), |acc, (w, phi)| {
        let unit = TwoQubitPure::normalized(*phi.amplitudes()).map(|p| p.projector());
        match unit {
            Ok(p) => acc + p * Complex64::new(*w / total, 0.0),
            Err(_) => acc,
        }
    });
    TwoQubitDensity::from_unnormalized(acc)
}

/// Detector signature: `p` photons at D₁, `q` at D₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    pub p: u32,
    pub q: u32,
}

impl Signature {
    pub const fn new(p: u32, q: u32) -> Self {
        Self { p, q }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// One detector signature, how likely it is, and the spin state it heralds.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionOutcome {
    pub signature: Signature,
    pub probability: f64,
    /// `None` when the probability is below [`NULL_OUTCOME_PROBABILITY`].
    pub state: Option<TwoQubitDensity>,
    pub concurrence: f64,
}

impl DetectionOutcome {
    /// Builds an outcome from the unnormalized heralded operator, whose trace
    /// is the outcome probability.
    pub fn from_unnormalized(signature: Signature, matrix: Matrix4<Complex64>) -> Result<Self> {
        let probability = matrix.trace().re;
        if probability <= NULL_OUTCOME_PROBABILITY {
            return Ok(Self::null(signature, probability.max(0.0)));
        }
        let state = TwoQubitDensity::from_unnormalized(matrix)?;
        let concurrence = entanglement::concurrence_mixed(&state)?;
        Ok(Self { signature, probability, state: Some(state), concurrence })
    }

    /// Outcome heralding the pure state obtained by normalizing `amplitudes`.
    pub fn pure(signature: Signature, probability: f64, amplitudes: [Complex64; 4]) -> Result<Self> {
        if probability <= NULL_OUTCOME_PROBABILITY {
            return Ok(Self::null(signature, probability.max(0.0)));
        }
        let phi = TwoQubitPure::normalized(amplitudes)?;
        let concurrence = entanglement::concurrence_pure(&phi)?;
        Ok(Self {
            signature,
            probability,
            state: Some(TwoQubitDensity::pure(&phi)?),
            concurrence,
        })
    }

    pub fn null(signature: Signature, probability: f64) -> Self {
        Self { signature, probability, state: None, concurrence: 0.0 }
    }
}

/// What was sent into the interferometer and how it was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunInfo {
    /// Photons injected into the upper and lower input arm.
    pub photons: (u32, u32),
    pub envelope: String,
    pub detector: String,
}

/// All outcomes of one protocol run plus their average concurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    pub outcomes: Vec<DetectionOutcome>,
    pub c_avg: f64,
    pub info: RunInfo,
}

impl ProtocolResult {
    /// Checks the probability ledger and evaluates the average concurrence.
    pub fn new(outcomes: Vec<DetectionOutcome>, info: RunInfo) -> Result<Self> {
        let mut result = Self { outcomes, c_avg: 0.0, info };
        result.c_avg = entanglement::average_concurrence(&result)?;
        Ok(result)
    }

    pub fn outcome(&self, signature: Signature) -> Option<&DetectionOutcome> {
        self.outcomes.iter().find(|o| o.signature == signature)
    }

    /// Probability of `signature`, zero if the protocol cannot produce it.
    pub fn probability(&self, signature: Signature) -> f64 {
        self.outcome(signature).map_or(0.0, |o| o.probability)
    }

    pub fn concurrence(&self, signature: Signature) -> Option<f64> {
        self.outcome(signature).map(|o| o.concurrence)
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn loss_rate_from_beta() {
        assert_eq!(gamma_from_beta(1.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(gamma_from_beta(1.0, 0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(gamma_from_beta(1.0, 0.9).unwrap(), 1.0 / 9.0, epsilon = 1e-15);
        assert!(gamma_from_beta(1.0, 0.0).is_err());
        assert!(gamma_from_beta(1.0, 1.5).is_err());
        assert!(gamma_from_beta(0.0, 0.5).is_err());
    }

    #[test]
    fn beta_round_trip() {
        for &beta in &[0.05, 0.3, 0.5, 0.77, 0.9, 0.999, 1.0] {
            for &rate in &[0.1, 0.66, 1.0, 2.0, 17.0] {
                let gamma = gamma_from_beta(rate, beta).unwrap();
                assert_abs_diff_eq!(rate / (rate + gamma), beta, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn lifetimes_of_quoted_linewidths() {
        assert_abs_diff_eq!(lifetime_from_linewidth(0.66).unwrap(), 1.0, epsilon = 5e-3);
        assert_abs_diff_eq!(lifetime_from_linewidth(1.0).unwrap(), 0.658, epsilon = 5e-4);
        assert_abs_diff_eq!(lifetime_from_linewidth(2.0).unwrap(), 0.33, epsilon = 2e-3);
        assert!(lifetime_from_linewidth(0.0).is_err());
        assert!(lifetime_from_linewidth(-1.0).is_err());
    }

    #[test]
    fn emitter_rejects_bad_parameters() {
        assert!(EmitterParams::new(f64::NAN, 1.0, 1.0).is_err());
        assert!(EmitterParams::new(0.0, -1.0, 1.0).is_err());
        assert!(EmitterParams::new(0.0, 1.0, 0.0).is_err());
        let e = EmitterParams::new(3.0, 1.0, 0.9).unwrap();
        assert_abs_diff_eq!(e.total_rate(), 1.0 / 0.9, epsilon = 1e-15);
        assert!(!e.is_lossless());
    }

    #[test]
    fn detuning_is_signed() {
        let sys = SystemParams::from_detuning(5.0, 1.0, 1.0, -2.0, 1.0, 1.0).unwrap();
        assert_eq!(sys.detuning(), -2.0);
        assert_eq!(sys.swapped().detuning(), 2.0);
    }

    #[test]
    fn single_projector_mixture() {
        let rho = density_from_pure_mixture(&[(1.0, TwoQubitPure::phi_minus())]).unwrap();
        let expected = TwoQubitPure::phi_minus().projector();
        assert!((rho.matrix() - expected).norm() < 1e-15);
    }

    #[test]
    fn classical_mixture_and_weight_scaling() {
        let diag = |rho: &TwoQubitDensity| [0, 1, 2, 3].map(|i| rho.matrix()[(i, i)].re);
        let a = density_from_pure_mixture(&[
            (0.5, TwoQubitPure::up_up()),
            (0.5, TwoQubitPure::down_down()),
        ])
        .unwrap();
        let b = density_from_pure_mixture(&[
            (2.0, TwoQubitPure::up_up()),
            (2.0, TwoQubitPure::down_down()),
        ])
        .unwrap();
        assert_eq!(diag(&a), [0.5, 0.0, 0.0, 0.5]);
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_mixture_is_rejected() {
        let err = density_from_pure_mixture(&[(0.0, TwoQubitPure::up_up())]).unwrap_err();
        assert_eq!(err, Error::DegenerateMixture);
        assert!(density_from_pure_mixture(&[]).is_err());
        assert!(density_from_pure_mixture(&[(-1.0, TwoQubitPure::up_up())]).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(TwoQubitDensity::new(Matrix4::identity()).is_err());
        let mut m = TwoQubitDensity::maximally_mixed().into_matrix();
        m[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(TwoQubitDensity::new(m).is_err());
        let neg = Matrix4::from_diagonal(&nalgebra::Vector4::new(0.6, 0.6, -0.2, 0.0))
            .map(|x: f64| Complex64::new(x, 0.0));
        assert!(TwoQubitDensity::new(neg).is_err());
    }
}
