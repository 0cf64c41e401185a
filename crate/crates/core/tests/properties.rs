use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use ptheta::bounds::{k_bound, l_bound, m_bound, psi, xi};
use ptheta::series::{theta, theta_tail_bound, theta_trunc, EvalConfig};
use ptheta::spectra::resultant_at;
use ptheta::torusopt::{objective_and_gradient, TorusProblem};
use ptheta::zeros::{roots_truncation, separating_radius};

fn polar(r: f64, t: f64) -> Complex64 {
    Complex64::from_polar(r, t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn conjugation_symmetry(r in 0.05f64..0.9, t in -PI..PI, s in 0.1f64..20.0, u in -PI..PI) {
        let cfg = EvalConfig::default();
        let (q, x) = (polar(r, t), polar(s, u));
        let a = theta(q, x, &cfg).unwrap().value;
        let b = theta(q.conj(), x.conj(), &cfg).unwrap().value;
        prop_assert!((a.conj() - b).norm() <= 1e-13 * a.norm().max(1.0));
    }

    #[test]
    fn truncation_error_within_tail_bound(r in 0.05f64..0.9, t in -PI..PI, e in 0.0f64..0.95, u in -PI..PI, k in 1usize..20) {
        // The geometric majorant needs |q|^{k+1} |x| < 1.
        let s = r.powf(-((k + 1) as f64) * e);
        let cfg = EvalConfig::default();
        let (q, x) = (polar(r, t), polar(s, u));
        let full = theta(q, x, &cfg).unwrap();
        let part = theta_trunc(q, x, k).unwrap();
        let bound = theta_tail_bound(r, s, k).unwrap();
        let slack = full.tail_bound + 1e-13 * (full.value.norm() + part.norm());
        prop_assert!((full.value - part).norm() <= bound + slack);
    }

    #[test]
    fn resultant_commutes_with_conjugation(r in 0.1f64..1.1, t in -PI..PI, k in 2usize..12) {
        let q = polar(r, t);
        let a = resultant_at(k, q).unwrap();
        let b = resultant_at(k, q.conj()).unwrap();
        prop_assert!((a.conj() - b).norm() <= 1e-9 * a.norm());
    }

    #[test]
    fn torus_objective_is_periodic(k in 2usize..7, r in 0.2f64..0.8, a in 0.0f64..6.3, b in 0.0f64..6.3) {
        let p = TorusProblem::new(k, r, k as f64 / 2.0, (0.0, 2.0 * PI)).unwrap();
        let v = objective_and_gradient(&p, a, b).0;
        let shifted = objective_and_gradient(&p, a + 2.0 * PI, b - 2.0 * PI).0;
        prop_assert!((v - shifted).abs() <= 1e-10 * v.max(1.0));
    }

    #[test]
    fn bound_functions_are_monotone(s in 0.05f64..0.9, d in 0.001f64..0.09) {
        let t = s + d;
        prop_assert!(psi(s) < psi(t));
        prop_assert!(l_bound(s) < l_bound(t));
        prop_assert!(m_bound(s) < m_bound(t));
        prop_assert!(xi(s, t) > 0.0 && (xi(s, t) - xi(t, s)).abs() < 1e-15);
        prop_assert!(k_bound(s, t) > 0.0 && k_bound(s, s) == 0.0);
    }

    #[test]
    fn small_q_zeros_are_separated(r in 0.02f64..0.2, t in -PI..PI) {
        // Below c0 every zero sits in its own annulus.
        let q = polar(r, t);
        let zeros = roots_truncation(q, 10).unwrap().zeros;
        for (j, z) in zeros.iter().take(6).enumerate() {
            let lo = if j == 0 { 0.0 } else { separating_radius(r, j) };
            prop_assert!(z.norm() > lo && z.norm() < separating_radius(r, j + 1));
        }
    }
}
