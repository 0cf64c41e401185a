//! `Res(θ_k, ∂θ_k/∂x; x)` as a Sylvester determinant.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SpectraError;
use crate::scalar::tri;

pub const MIN_RESULTANT_ORDER: usize = 2;
pub const MAX_RESULTANT_ORDER: usize = 20;

/// `mantissa · 2^exponent`, with `1/2 ≤ |mantissa| < 1` unless the value is
/// zero (then both fields are zero).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawResultant {
    pub mantissa: Complex64,
    pub exponent: i64,
}

impl RawResultant {
    pub fn zero() -> Self {
        Self {
            mantissa: Complex64::new(0.0, 0.0),
            exponent: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == Complex64::new(0.0, 0.0)
    }

    /// Natural logarithm of the modulus (`-∞` for zero).
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.norm().ln() + self.exponent as f64 * std::f64::consts::LN_2
        }
    }

    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }

    /// Plain complex value; fails when the modulus is beyond `f64` range.
    /// Values below the range collapse to zero.
    pub fn collapse(&self) -> Result<Complex64, SpectraError> {
        if self.is_zero() {
            return Ok(self.mantissa);
        }
        if self.exponent > f64::MAX_EXP as i64 {
            return Err(SpectraError::Overflow { exponent: self.exponent });
        }
        if self.exponent < f64::MIN_EXP as i64 - 60 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let e = self.exponent as i32;
        // Split the scaling so no intermediate factor overflows.
        let half = e / 2;
        let v = self.mantissa * 2f64.powi(half) * 2f64.powi(e - half);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(SpectraError::Overflow { exponent: self.exponent })
        }
    }

    fn from_ln_and_phase(ln_abs: f64, phase: Complex64) -> Self {
        let log2 = ln_abs / std::f64::consts::LN_2;
        let exponent = log2.floor() as i64 + 1;
        let mag = (log2 - exponent as f64).exp2();
        Self {
            mantissa: phase * mag,
            exponent,
        }
    }
}

/// The `(2k−1)×(2k−1)` Sylvester matrix of `θ_k` and `∂θ_k/∂x` in `x`, with
/// coefficients listed from the highest power down.
pub fn sylvester_matrix(k: usize, q: Complex64) -> Vec<Vec<Complex64>> {
    let zero = Complex64::new(0.0, 0.0);
    let a: Vec<Complex64> = (0..=k).map(|j| q.powu(tri(j as u64) as u32)).collect();
    let f_desc: Vec<Complex64> = a.iter().rev().copied().collect();
    let d_desc: Vec<Complex64> = (1..=k).rev().map(|j| a[j] * j as f64).collect();
    let n = 2 * k - 1;
    let mut m = vec![vec![zero; n]; n];
    // deg ∂θ_k = k − 1 rows of θ_k, deg θ_k = k rows of the derivative.
    for i in 0..k - 1 {
        m[i][i..i + k + 1].copy_from_slice(&f_desc);
    }
    for i in 0..k {
        m[k - 1 + i][i..i + k].copy_from_slice(&d_desc);
    }
    m
}

/// Determinant by LU with partial pivoting after scaling every row to unit
/// max-modulus; the row scales are restored in log form.
fn scaled_determinant(mut m: Vec<Vec<Complex64>>) -> RawResultant {
    let n = m.len();
    let mut ln_abs = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);
    for row in m.iter_mut() {
        let s = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if s == 0.0 {
            return RawResultant::zero();
        }
        ln_abs += s.ln();
        for z in row.iter_mut() {
            *z /= s;
        }
    }
    for col in 0..n {
        let (piv, pmax) = (col..n)
            .map(|r| (r, m[r][col].norm()))
            .fold((col, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        if pmax == 0.0 {
            return RawResultant::zero();
        }
        if piv != col {
            m.swap(piv, col);
            phase = -phase;
        }
        let p = m[col][col];
        ln_abs += p.norm().ln();
        phase *= p / p.norm();
        let (top, bottom) = m.split_at_mut(col + 1);
        let pivot_row = &top[col][col..];
        for row in bottom {
            let f = row[col] / p;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (z, v) in row[col..].iter_mut().zip(pivot_row) {
                *z -= f * v;
            }
        }
    }
    RawResultant::from_ln_and_phase(ln_abs, phase)
}

/// Resultant in mantissa/exponent form; never overflows.
pub fn resultant_raw(k: usize, q: Complex64) -> Result<RawResultant, SpectraError> {
    if !(MIN_RESULTANT_ORDER..=MAX_RESULTANT_ORDER).contains(&k) {
        return Err(SpectraError::InvalidParameter(format!(
            "resultant order {k} not in {MIN_RESULTANT_ORDER}..={MAX_RESULTANT_ORDER}"
        )));
    }
    if !(q.re.is_finite() && q.im.is_finite()) {
        return Err(SpectraError::InvalidParameter("q is not finite".into()));
    }
    if q == Complex64::new(0.0, 0.0) {
        return Ok(RawResultant::zero());
    }
    Ok(scaled_determinant(sylvester_matrix(k, q)))
}

/// Resultant as a plain complex number.
pub fn resultant_at(k: usize, q: Complex64) -> Result<Complex64, SpectraError> {
    resultant_raw(k, q)?.collapse()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det3(m: &[Vec<Complex64>]) -> Complex64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    #[test]
    fn order_two_closed_form() {
        for q in [Complex64::new(0.3, 0.1), Complex64::new(-0.7, 0.4), Complex64::new(1.1, -0.2)] {
            let m = sylvester_matrix(2, q);
            let brute = det3(&m);
            let closed = q.powu(5) * (q * 4.0 - 1.0);
            let r = resultant_at(2, q).unwrap();
            assert!((brute - closed).norm() < 1e-14 * closed.norm().max(1.0));
            assert!((r - closed).norm() < 1e-13 * closed.norm(), "{r} vs {closed}");
        }
        assert!(resultant_at(2, Complex64::new(0.25, 0.0)).unwrap().norm() < 1e-16);
    }

    #[test]
    fn origin_is_a_zero() {
        assert!(resultant_raw(15, Complex64::new(0.0, 0.0)).unwrap().is_zero());
    }

    #[test]
    fn order_bounds() {
        assert!(resultant_raw(1, Complex64::new(0.3, 0.0)).is_err());
        assert!(resultant_raw(21, Complex64::new(0.3, 0.0)).is_err());
    }

    #[test]
    fn raw_form_survives_overflow() {
        let raw = resultant_raw(20, Complex64::new(1.19, 0.3)).unwrap();
        assert!(raw.ln_abs().is_finite());
    }

    #[test]
    fn matches_product_over_roots() {
        // Res(f, f') = a_k^{k-1} · Π f'(ξ_i) over the roots ξ_i of f.
        let q = Complex64::new(0.5, 0.2);
        for k in [3usize, 8, 12] {
            let roots = crate::zeros::roots_truncation(q, k).unwrap().zeros;
            let lead = q.powu(tri(k as u64) as u32);
            let mut prod = lead.powu(k as u32 - 1);
            for z in &roots {
                prod *= crate::series::trunc_jet(q, *z, k).unwrap().fx;
            }
            let r = resultant_at(k, q).unwrap();
            assert!((r - prod).norm() < 1e-8 * prod.norm(), "k={k}: {r} vs {prod}");
        }
    }

    #[test]
    fn collapse_round_trip() {
        let r = RawResultant::from_ln_and_phase(3.0f64.ln(), Complex64::new(0.0, 1.0));
        let v = r.collapse().unwrap();
        assert!((v - Complex64::new(0.0, 3.0)).norm() < 1e-14);
        assert!(r.mantissa.norm() >= 0.5 && r.mantissa.norm() < 1.0);
        let big = RawResultant { mantissa: Complex64::new(0.5, 0.0), exponent: 5000 };
        assert!(matches!(big.collapse(), Err(SpectraError::Overflow { .. })));
    }
}
