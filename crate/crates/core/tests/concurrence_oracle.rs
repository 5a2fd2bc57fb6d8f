//! Concurrence against the square-root-matrix definition, plus invariances.

use approx::assert_abs_diff_eq;
use mzient::domain::{density_from_pure_mixture, TwoQubitDensity, TwoQubitPure};
use mzient::entanglement::{concurrence_mixed, concurrence_pure};
use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type M4 = Matrix4<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> M4 {
    M4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

fn sqrt_psd(m: &M4) -> M4 {
    let e = SymmetricEigen::new((m + m.adjoint()) * c(0.5, 0.0));
    let d = M4::from_diagonal(&e.eigenvalues.map(|x| c(x.max(0.0).sqrt(), 0.0)));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

/// R = √(√ρ ρ̃ √ρ), ρ̃ = (σ_y⊗σ_y)ρ*(σ_y⊗σ_y); C from the eigenvalues of R.
fn oracle(rho: &M4) -> f64 {
    let sy = Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0));
    let yy = kron(&sy, &sy);
    let tilde = &yy * rho.map(|z| z.conj()) * &yy;
    let root = sqrt_psd(rho);
    let r = sqrt_psd(&(&root * tilde * &root));
    let mut l: Vec<f64> = SymmetricEigen::new(r).eigenvalues.iter().copied().collect();
    l.sort_by(|a, b| b.total_cmp(a));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

/// Ginibre-ensemble density matrix GG†/tr.
fn random_density(rng: &mut impl Rng) -> M4 {
    let g = M4::from_fn(|_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = &g * g.adjoint();
    m / m.trace()
}

/// Mostly weight on one entangled vector, so the concurrence is not always 0.
fn random_entangled_density(rng: &mut impl Rng) -> M4 {
    let v: [Complex64; 4] = std::array::from_fn(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let phi = TwoQubitPure::normalized(v).unwrap().projector();
    let p: f64 = rng.gen_range(0.5..0.98);
    phi * c(p, 0.0) + random_density(rng) * c(1.0 - p, 0.0)
}

#[test]
fn matches_square_root_definition_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut entangled = 0;
    for i in 0..1000 {
        let m = if i % 2 == 0 { random_density(&mut rng) } else { random_entangled_density(&mut rng) };
        let got = concurrence_mixed(&TwoQubitDensity::new(m).unwrap()).unwrap();
        let want = oracle(&m);
        assert_abs_diff_eq!(got, want, epsilon = 1e-10);
        entangled += usize::from(want > 0.05);
    }
    assert!(entangled > 200, "only {entangled} entangled samples");
}

#[test]
fn werner_states() {
    let singlet = TwoQubitPure::psi_minus().projector();
    for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
        let m = singlet * c(p, 0.0) + M4::identity() * c(0.25 * (1.0 - p), 0.0);
        let got = concurrence_mixed(&TwoQubitDensity::new(m).unwrap()).unwrap();
        assert_abs_diff_eq!(got, (1.5 * p - 0.5).max(0.0), epsilon = 1e-12);
    }
}

#[test]
fn equal_mixture_of_two_bell_states_is_separable() {
    let rho =
        density_from_pure_mixture(&[(1.0, TwoQubitPure::phi_minus()), (1.0, TwoQubitPure::psi_minus())])
            .unwrap();
    assert_abs_diff_eq!(concurrence_mixed(&rho).unwrap(), 0.0, epsilon = 1e-12);
}

fn unitary(a: f64, b: f64, g: f64, t: f64) -> Matrix2<Complex64> {
    let p = Complex64::from_polar(1.0, a);
    Matrix2::new(
        p * Complex64::from_polar(t.cos(), b),
        p * Complex64::from_polar(t.sin(), g),
        -p * Complex64::from_polar(t.sin(), -g),
        p * Complex64::from_polar(t.cos(), -b),
    )
}

fn amplitudes() -> impl Strategy<Value = [Complex64; 4]> {
    prop::array::uniform4((-1.0..1.0f64, -1.0..1.0f64))
        .prop_filter("non-zero", |a| a.iter().map(|(x, y)| x * x + y * y).sum::<f64>() > 1e-3)
        .prop_map(|a| a.map(|(x, y)| c(x, y)))
}

fn density() -> impl Strategy<Value = M4> {
    (any::<u64>(), any::<bool>()).prop_map(|(seed, ent)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if ent {
            random_entangled_density(&mut rng)
        } else {
            random_density(&mut rng)
        }
    })
}

fn angles() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (-3.2..3.2f64, -3.2..3.2f64, -3.2..3.2f64, -1.6..1.6f64)
}

proptest! {
    #[test]
    fn pure_and_mixed_routes_agree(v in amplitudes()) {
        let phi = TwoQubitPure::normalized(v).unwrap();
        let pure = concurrence_pure(&phi).unwrap();
        let mixed = concurrence_mixed(&TwoQubitDensity::pure(&phi).unwrap()).unwrap();
        prop_assert!((pure - mixed).abs() < 1e-9, "{pure} vs {mixed}");
    }

    #[test]
    fn invariant_under_local_unitaries(m in density(), u in angles(), w in angles()) {
        let local = kron(&unitary(u.0, u.1, u.2, u.3), &unitary(w.0, w.1, w.2, w.3));
        let rotated = &local * m * local.adjoint();
        let before = concurrence_mixed(&TwoQubitDensity::new(m).unwrap()).unwrap();
        let after = concurrence_mixed(&TwoQubitDensity::from_unnormalized(rotated).unwrap()).unwrap();
        prop_assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn invariant_under_qubit_swap(m in density()) {
        let perm = [0, 2, 1, 3];
        let swapped = M4::from_fn(|i, j| m[(perm[i], perm[j])]);
        let before = concurrence_mixed(&TwoQubitDensity::new(m).unwrap()).unwrap();
        let after = concurrence_mixed(&TwoQubitDensity::new(swapped).unwrap()).unwrap();
        prop_assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn convex_under_mixing(a in density(), b in density(), p in 0.0..1.0f64) {
        let ca = concurrence_mixed(&TwoQubitDensity::new(a).unwrap()).unwrap();
        let cb = concurrence_mixed(&TwoQubitDensity::new(b).unwrap()).unwrap();
        let mix = TwoQubitDensity::new(a * c(p, 0.0) + b * c(1.0 - p, 0.0)).unwrap();
        prop_assert!(concurrence_mixed(&mix).unwrap() <= p * ca + (1.0 - p) * cb + 1e-10);
    }
}
