//! Randomized structural invariants.

use proptest::prelude::*;

use qeilab::isingbound::q_function;
use qeilab::kernel::{f_p, kernel_element, PolynomialP};
use qeilab::models::Model;
use qeilab::testfn::{Convention, TestFunction};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// g is real, so the g^2 transform obeys conj-symmetry in k.
    #[test]
    fn gsq_conjugation_symmetry(
        sigma in 0.2f64..3.0,
        center in -2.0f64..2.0,
        k in -8.0f64..8.0,
    ) {
        let g = TestFunction::gaussian(sigma, center).unwrap();
        for conv in [Convention::Plain, Convention::Normalized] {
            let a = g.fourier_gsq(k, conv).unwrap();
            let b = g.fourier_gsq(-k, conv).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1e-300));
        }
    }

    /// Amplitude scaling acts quadratically on the g^2 transform.
    #[test]
    fn gsq_amplitude_scaling(sigma in 0.2f64..3.0, s in 0.1f64..4.0, k in -5.0f64..5.0) {
        let g = TestFunction::gaussian(sigma, 0.0).unwrap();
        let a = g.fourier_gsq(k, Convention::Plain).unwrap();
        let b = g.scaled(s).fourier_gsq(k, Convention::Plain).unwrap();
        prop_assert!((b - a * s * s).norm() <= 1e-12 * b.norm().max(1e-300));
    }

    /// The scattering function is a phase, so |F_P| is even in theta.
    #[test]
    fn fp_modulus_is_even(theta in 0.0f64..20.0, alpha in -0.9f64..0.9) {
        let p = PolynomialP::linear(alpha).unwrap();
        for m in [
            Model::free(1.0).unwrap(),
            Model::ising(1.0).unwrap(),
            Model::sinh_gordon(1.0, 0.7).unwrap(),
        ] {
            let a = f_p(&m, &p, theta).unwrap().norm();
            let b = f_p(&m, &p, -theta).unwrap().norm();
            prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300), "{} {theta}", m.name());
        }
    }

    /// The assembled integrand is Hermitian under theta <-> eta.
    #[test]
    fn kernel_hermiticity(
        theta in -4.0f64..4.0,
        eta in -4.0f64..4.0,
        sigma in 0.3f64..2.0,
        center in -1.0f64..1.0,
    ) {
        let g = TestFunction::gaussian(sigma, center).unwrap();
        let m = Model::ising(1.0).unwrap();
        let p = PolynomialP::one();
        let a = kernel_element(&m, &p, &g, Convention::Plain, 0, 0, theta, eta).unwrap();
        let b = kernel_element(&m, &p, &g, Convention::Plain, 0, 0, eta, theta).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1e-300));
    }

    /// Q is within [0, 1] and non-decreasing.
    #[test]
    fn q_profile_shape(u in 1.0f64..100.0, du in 0.0f64..10.0) {
        let a = q_function(u).unwrap();
        let b = q_function(u + du).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a - 1e-12);
    }
}
