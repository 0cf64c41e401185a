//! Comparison functions on real radii used by the separation proof chain:
//! `Ξ`, `Ψ`, `K`, `L`, `M`, and the radius `c₀`.

use crate::scalar::{half_pow, Real};

const SERIES_REL_CUTOFF: f64 = 1e-17;
const SERIES_MAX_TERMS: usize = 200;

fn check_radius<T: Real>(s: T, name: &str) {
    assert!(
        s > T::zero() && s < T::one(),
        "{name} must lie in (0, 1), got {s}"
    );
}

/// `Σ_{j ≥ j0} s^{e(j)/2}` where `e(j)` is the doubled exponent.
fn half_exponent_series<T: Real>(s: T, j0: i64, doubled_exponent: impl Fn(i64) -> i64) -> T {
    let mut sum = T::zero();
    for j in j0..j0 + SERIES_MAX_TERMS as i64 {
        let term = half_pow(s, doubled_exponent(j));
        sum = sum + term;
        if term <= T::lit(SERIES_REL_CUTOFF) * sum {
            break;
        }
    }
    sum
}

/// `Ξ(s,t) = |s^{-1/2} − t^{-1/2}| + |s^{3/2} − t^{3/2}|`.
///
/// # Panics
/// If either argument is outside `(0, 1)`.
pub fn xi<T: Real>(s: T, t: T) -> T {
    check_radius(s, "s");
    check_radius(t, "t");
    (half_pow(s, -1) - half_pow(t, -1)).abs() + (half_pow(s, 3) - half_pow(t, 3)).abs()
}

/// `Ψ(s) = Σ_{j≥4} s^{j(j-2)/2}`: bound on `|θ_3^•|` on `|x| = |q|^{-3/2}`.
pub fn psi<T: Real>(s: T) -> T {
    check_radius(s, "s");
    half_exponent_series(s, 4, |j| j * (j - 2))
}

/// `K(s,t) = 2|s^{-3/2} − t^{-3/2}| + |s^{-2} − t^{-2}| + |s^{5/2} − t^{5/2}|`.
pub fn k_bound<T: Real>(s: T, t: T) -> T {
    check_radius(s, "s");
    check_radius(t, "t");
    T::lit(2.0) * (half_pow(s, -3) - half_pow(t, -3)).abs()
        + (half_pow(s, -4) - half_pow(t, -4)).abs()
        + (half_pow(s, 5) - half_pow(t, 5)).abs()
}

/// `L(s) = Σ_{j≥6} s^{j(j-4)/2}`: bound on `|θ_5^•|` on `|x| = |q|^{-5/2}`.
pub fn l_bound<T: Real>(s: T) -> T {
    check_radius(s, "s");
    half_exponent_series(s, 6, |j| j * (j - 4))
}

/// `M(s) = L(s) + s^{5/2} = Σ_{j≥5} s^{j(j-4)/2}`.
pub fn m_bound<T: Real>(s: T) -> T {
    l_bound(s) + half_pow(s, 5)
}

/// `f(r) = 2 Σ_{ν≥1} r^{ν²/2} − 1`, strictly increasing on `(0, 1)`.
pub fn c0_defining_function<T: Real>(r: T) -> T {
    check_radius(r, "r");
    T::lit(2.0) * half_exponent_series(r, 1, |v| v * v) - T::one()
}

/// The unique root in `(0, 1)` of [`c0_defining_function`], by bisection.
pub fn solve_c0<T: Real>() -> T {
    let mut lo = T::lit(0.05);
    let mut hi = T::lit(0.5);
    debug_assert!(c0_defining_function(lo) < T::zero());
    debug_assert!(c0_defining_function(hi) > T::zero());
    let tol = T::tol(1e-13);
    while hi - lo > tol {
        let mid = (lo + hi) / T::lit(2.0);
        if c0_defining_function(mid) > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / T::lit(2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xi_values() {
        let v = xi(0.6, 0.5);
        assert!(v > 0.2344 && v < 0.2345, "{v}");
        let v = xi(0.5, 0.4);
        assert!(v > 0.2674 && v < 0.2675, "{v}");
        assert_eq!(xi(0.3, 0.3), 0.0);
        assert_eq!(xi(0.3, 0.45), xi(0.45, 0.3));
    }

    #[test]
    fn psi_values() {
        let v = psi(0.5);
        assert!(v > 0.0682 && v < 0.0683, "{v}");
        let v = psi(0.6) - psi(0.5);
        assert!(v > 0.0853 && v < 0.0854, "{v}");
        let v = psi(0.36);
        assert!(v > 0.0172 && v < 0.0173, "{v}");
    }

    #[test]
    fn psi_agrees_with_theta_tail_bound() {
        for r in [0.2f64, 0.36, 0.5, 0.6] {
            let t = crate::series::theta_tail_bound(r, r.powf(-1.5), 3).unwrap();
            assert!((psi(r) - t).abs() < 1e-14);
        }
    }

    #[test]
    fn k_bound_basics() {
        assert_eq!(k_bound(0.4, 0.4), 0.0);
        assert_eq!(k_bound(0.21, 0.5), k_bound(0.5, 0.21));
        // Independent evaluation with integer powers of sqrt(s).
        let (s, t) = (0.2050f64, 0.2025f64);
        let (rs, rt) = (s.sqrt(), t.sqrt());
        let oracle = 2.0 * (1.0 / (rs * rs * rs) - 1.0 / (rt * rt * rt)).abs()
            + (1.0 / (s * s) - 1.0 / (t * t)).abs()
            + (rs.powi(5) - rt.powi(5)).abs();
        let k = k_bound(s, t);
        assert!((k - oracle).abs() < 1e-12, "{k} vs {oracle}");
        assert!(k > 0.99 && k < 0.9925, "{k}");
    }

    #[test]
    fn m_minus_l() {
        for s in [0.2025, 0.4, 0.6] {
            assert_eq!(m_bound(s) - l_bound(s), half_pow(s, 5));
        }
    }

    #[test]
    fn m_and_l_direct_sums() {
        let m: f64 = (5..45).map(|j: i32| 0.6f64.powf((j * (j - 4)) as f64 / 2.0)).sum();
        assert!((m_bound(0.6) - m).abs() < 1e-15);
        let s = 0.2025f64;
        let l: f64 = (6..46).map(|j: i32| s.powf((j * (j - 4)) as f64 / 2.0)).sum();
        assert!((l_bound(s) - l).abs() < 1e-18);
        assert!((l_bound(s) - s.powi(6)).abs() < s.powi(6) * 1e-3);
    }

    #[test]
    fn c0() {
        let c: f64 = solve_c0();
        assert!((c - 0.2078750206).abs() < 1e-9, "{c}");
        assert!(c0_defining_function(c).abs() < 1e-11);
        assert!(c0_defining_function(0.5f64) > 0.0);
        assert!(c0_defining_function(0.05f64) < 0.0);
    }

    #[test]
    #[should_panic]
    fn domain_violation_panics() {
        psi(1.0f64);
    }
}
