//! Wootters concurrence and the outcome-averaged concurrence.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::domain::{ProtocolResult, TwoQubitDensity, TwoQubitPure};
use crate::error::{Error, Result};

/// Allowed slack on the probability ledger of a protocol run.
pub const PROBABILITY_SUM_TOL: f64 = 1e-6;
const PURE_NORM_TOL: f64 = 1e-6;
/// Eigenvalues of ρ below this are round-off and are dropped before the
/// factorization; a noise eigenvalue ε would otherwise move C by O(√ε).
const RANK_TOL: f64 = 1e-14;

/// 2|a₀₀a₁₁ − a₀₁a₁₀|
pub fn concurrence_pure(state: &TwoQubitPure) -> Result<f64> {
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > PURE_NORM_TOL {
        return Err(Error::InvalidState {
            module: "entanglement",
            detail: format!("pure state has squared norm {norm}"),
        });
    }
    let [a, b, c, d] = *state.amplitudes();
    Ok((2.0 * (a * d - b * c).norm()).min(1.0))
}

/// ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y).
///
/// σ_y⊗σ_y maps the basis (↑↑, ↑↓, ↓↑, ↓↓) to (−↓↓, ↓↑, ↑↓, −↑↑), so the flip
/// reverses the index order and changes the sign of entries that couple the
/// even (↑↑, ↓↓) and odd (↑↓, ↓↑) sectors.
pub fn spin_flip(rho: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let sign = [-1.0, 1.0, 1.0, -1.0];
    Matrix4::from_fn(|i, j| rho[(3 - i, 3 - j)].conj() * (sign[i] * sign[j]))
}

/// max(0, λ₁ − λ₂ − λ₃ − λ₄), with λᵢ² the eigenvalues of ρρ̃ in decreasing order.
///
/// With any factorization ρ = WW†, the nonzero eigenvalues of ρρ̃ are those
/// of τ†τ for τ = Wᵀ(σ_y⊗σ_y)W, so the λᵢ are the singular values of τ. This
/// avoids taking square roots of round-off sized eigenvalues, which would
/// otherwise leave O(1e−8) errors on rank-deficient states. For the same
/// reason eigenvalues below `RANK_TOL` are treated as exact zeros.
pub fn concurrence_mixed(rho: &TwoQubitDensity) -> Result<f64> {
    let eigen = SymmetricEigen::new(*rho.matrix());
    let mut w = eigen.eigenvectors;
    for (k, p) in eigen.eigenvalues.iter().enumerate() {
        let scale = Complex64::new(if *p > RANK_TOL { p.sqrt() } else { 0.0 }, 0.0);
        w.column_mut(k).iter_mut().for_each(|z| *z *= scale);
    }
    let tau = w.transpose() * spin_flip_operator() * w;
    let mut lambdas: Vec<f64> = tau.singular_values().iter().copied().collect();
    if lambdas.iter().any(|l| !l.is_finite()) {
        return Err(Error::Numerical {
            module: "entanglement",
            detail: "singular values of the flip product are not finite".into(),
        });
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// σ_y⊗σ_y in the basis (↑↑, ↑↓, ↓↑, ↓↓).
pub fn spin_flip_operator() -> Matrix4<Complex64> {
    let sign = [-1.0, 1.0, 1.0, -1.0];
    Matrix4::from_fn(|i, j| Complex64::new(if i + j == 3 { sign[j] } else { 0.0 }, 0.0))
}

/// Σ Pr(p,q)·C(ρ_(p,q)) over the outcomes of `result`.
pub fn average_concurrence(result: &ProtocolResult) -> Result<f64> {
    let total = result.total_probability();
    if !((total - 1.0).abs() <= PROBABILITY_SUM_TOL) {
        return Err(Error::Consistency(format!(
            "outcome probabilities sum to {total:.12} for {}",
            result.info.envelope
        )));
    }
    Ok(result.outcomes.iter().map(|o| o.probability * o.concurrence).sum::<f64>().clamp(0.0, 1.0))
}
