//! Fock-input engine: reductions to the one- and two-photon paths and a
//! brute-force polynomial expansion of the interferometer.

use approx::assert_abs_diff_eq;
use mzient::protocols::{
    n_photon_monochromatic, single_photon_monochromatic, two_photon_monochromatic_identical,
};
use mzient::scattering::transmission;
use mzient::{ProtocolResult, Signature, SystemParams};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assert_same(a: &ProtocolResult, b: &ProtocolResult, tol: f64) {
    for o in a.outcomes.iter().chain(&b.outcomes) {
        let s = o.signature;
        assert_abs_diff_eq!(a.probability(s), b.probability(s), epsilon = tol);
        if a.probability(s) > 1e-12 {
            assert_abs_diff_eq!(
                a.concurrence(s).unwrap_or(0.0),
                b.concurrence(s).unwrap_or(0.0),
                epsilon = tol
            );
        }
    }
    assert_abs_diff_eq!(a.c_avg, b.c_avg, epsilon = tol);
}

fn random_system(rng: &mut impl Rng) -> (SystemParams, f64) {
    let g1 = rng.gen_range(0.3..3.0);
    let sys = SystemParams::from_detuning(
        rng.gen_range(-2.0..2.0),
        g1,
        1.0,
        rng.gen_range(0.0..3.0 * g1),
        rng.gen_range(0.2 * g1..3.0 * g1),
        1.0,
    )
    .unwrap();
    let omega = sys.midpoint() + rng.gen_range(-3.0..3.0) * sys.max_rate();
    (sys, omega)
}

#[test]
fn reduces_to_dedicated_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let (sys, omega) = random_system(&mut rng);
        assert_same(
            &n_photon_monochromatic(1, 0, &sys, omega).unwrap(),
            &single_photon_monochromatic(&sys, omega).unwrap(),
            1e-12,
        );
        assert_same(
            &n_photon_monochromatic(1, 1, &sys, omega).unwrap(),
            &two_photon_monochromatic_identical(&sys, omega).unwrap(),
            1e-12,
        );
    }
}

/// Homogeneous polynomial of degree N in (x, y), indexed by the power of x.
type Poly = Vec<Complex64>;

fn times_linear(p: &Poly, a: f64, b: f64) -> Poly {
    let mut out = vec![Complex64::new(0.0, 0.0); p.len() + 1];
    for (k, c) in p.iter().enumerate() {
        out[k + 1] += c * a;
        out[k] += c * b;
    }
    out
}

fn fact(n: usize) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

/// Pr(p, N−p) and the unnormalized spin vectors, from expanding
/// a^n b^m through a → (u+d)/√2, b → (d−u)/√2, the emitters, and
/// u → (D₁−D₂)/√2, d → (D₁+D₂)/√2.
fn brute_force(n: usize, m: usize, t1: Complex64, t2: Complex64) -> Vec<(f64, [Complex64; 4])> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let total = n + m;
    let mut inner: Poly = vec![Complex64::new(1.0 / (fact(n) * fact(m)).sqrt(), 0.0)];
    for _ in 0..n {
        inner = times_linear(&inner, r, r);
    }
    for _ in 0..m {
        inner = times_linear(&inner, -r, r);
    }
    let mut spins = vec![[Complex64::new(0.0, 0.0); 4]; total + 1];
    for (s, (up1, up2)) in [(true, true), (true, false), (false, true), (false, false)].into_iter().enumerate() {
        let mut out: Poly = vec![Complex64::new(0.0, 0.0); total + 1];
        for (k, c) in inner.iter().enumerate() {
            let mut phase = *c * 0.5;
            if up1 {
                phase *= t1.powu(k as u32);
            }
            if up2 {
                phase *= t2.powu((total - k) as u32);
            }
            let mut term: Poly = vec![phase];
            for _ in 0..k {
                term = times_linear(&term, r, -r);
            }
            for _ in 0..total - k {
                term = times_linear(&term, r, r);
            }
            for (o, t) in out.iter_mut().zip(term) {
                *o += t;
            }
        }
        for p in 0..=total {
            spins[p][s] = out[p] * (fact(p) * fact(total - p)).sqrt();
        }
    }
    spins.into_iter().map(|v| (v.iter().map(|a| a.norm_sqr()).sum(), v)).collect()
}

#[test]
fn matches_polynomial_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let (sys, omega) = random_system(&mut rng);
        let t1 = transmission(omega, &sys.emitter1);
        let t2 = transmission(omega, &sys.emitter2);
        for total in 1..=6usize {
            for n in 0..=total {
                let m = total - n;
                let r = n_photon_monochromatic(n as u32, m as u32, &sys, omega).unwrap();
                let oracle = brute_force(n, m, t1, t2);
                let mut c_avg = 0.0;
                for (p, (prob, v)) in oracle.iter().enumerate() {
                    let sig = Signature::new(p as u32, (total - p) as u32);
                    assert_abs_diff_eq!(r.probability(sig), *prob, epsilon = 1e-12);
                    c_avg += 2.0 * (v[0] * v[3] - v[1] * v[2]).norm();
                }
                assert_abs_diff_eq!(r.total_probability(), 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(r.c_avg, c_avg, epsilon = 1e-12);
            }
        }
    }
}
