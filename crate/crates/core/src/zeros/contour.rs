//! Argument-principle zero counting on circles `|x| = R`.

use num_complex::Complex;
use rayon::prelude::*;

use super::{AnnulusSpec, Result, ZerosError};
use crate::scalar::{Cx, Real};
use crate::series::{theta_and_dx, EvalConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourConfig<T> {
    pub initial_samples: usize,
    pub max_samples: usize,
    /// Accepted distance of the quadrature value from an integer.
    pub winding_tol: T,
    pub eval: EvalConfig<T>,
}

impl<T: Real> Default for ContourConfig<T> {
    fn default() -> Self {
        Self {
            initial_samples: 256,
            max_samples: 65536,
            winding_tol: T::lit(0.05),
            eval: EvalConfig::default(),
        }
    }
}

impl<T: Real> ContourConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.initial_samples < 8 || self.max_samples < self.initial_samples {
            return Err(ZerosError::InvalidParameter(format!(
                "need 8 <= initial_samples <= max_samples, got {} and {}",
                self.initial_samples, self.max_samples
            )));
        }
        if !(self.winding_tol > T::zero() && self.winding_tol < T::lit(0.5)) {
            return Err(ZerosError::InvalidParameter(format!(
                "winding_tol must be in (0, 0.5), got {}",
                self.winding_tol
            )));
        }
        self.eval.validate()?;
        Ok(())
    }
}

/// Samples of `x θ'(x)/θ(x)` at `x = R e^{2πi n/N}` for the given indices.
fn integrand<T: Real>(
    q: Cx<T>,
    radius: T,
    n_total: usize,
    indices: impl IndexedParallelIterator<Item = usize>,
    cfg: &ContourConfig<T>,
) -> Result<Vec<Cx<T>>> {
    // Distance proxy |θ/θ'| below this fraction of R counts as a zero on the contour.
    let near = T::lit(1e-6) * radius;
    indices
        .map(|n| {
            let phase = T::lit(2.0 * std::f64::consts::PI) * T::from_usize_lossy(n)
                / T::from_usize_lossy(n_total);
            let x = Complex::from_polar(radius, phase);
            let (f, df) = theta_and_dx(q, x, &cfg.eval)?;
            let fnorm = f.value.norm();
            if fnorm <= T::lit(16.0) * f.tail_bound || fnorm <= near * df.value.norm() {
                return Err(ZerosError::ZeroOnContour {
                    radius: radius.to_f64_lossy(),
                });
            }
            Ok(x * df.value / f.value)
        })
        .collect()
}

/// Number of zeros of `θ(q,·)` in the open disk `|x| < radius`.
///
/// Trapezoidal rule for `(1/2πi)∮ θ'/θ dx`, doubling the number of nodes
/// until the value is within `winding_tol` of an integer and keeps rounding
/// to the same integer after one further doubling.
pub fn count_zeros_disk<T: Real>(q: Cx<T>, radius: T, cfg: &ContourConfig<T>) -> Result<usize> {
    cfg.validate()?;
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(ZerosError::InvalidParameter(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let mut n = cfg.initial_samples;
    let mut values = integrand(q, radius, n, (0..n).into_par_iter(), cfg)?;
    let mut previous: Option<i64> = None;
    loop {
        // Fixed summation order keeps the result independent of scheduling.
        let sum = values
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, v| acc + v);
        let w = sum.re / T::from_usize_lossy(n);
        let rounded = w.round();
        let close = (w - rounded).abs() < cfg.winding_tol && sum.im.abs() / T::from_usize_lossy(n) < cfg.winding_tol;
        let current = if close { rounded.to_i64() } else { None };
        if let (Some(c), Some(p)) = (current, previous) {
            if c == p {
                if c < 0 {
                    return Err(ZerosError::NotAnInteger { last: w.to_f64_lossy() });
                }
                return Ok(c as usize);
            }
        }
        previous = current;
        if 2 * n > cfg.max_samples {
            return Err(ZerosError::NotAnInteger { last: w.to_f64_lossy() });
        }
        // New nodes are the odd indices of the refined grid.
        let odd = integrand(q, radius, 2 * n, (0..n).into_par_iter().map(|i| 2 * i + 1), cfg)?;
        let mut merged = Vec::with_capacity(2 * n);
        for (even, odd) in values.into_iter().zip(odd) {
            merged.push(even);
            merged.push(odd);
        }
        values = merged;
        n *= 2;
    }
}

/// Number of zeros in `{ |q|^{-a} < |x| < |q|^{-b} }`, as a difference of
/// two disk counts.
pub fn count_zeros_annulus<T: Real>(
    q: Cx<T>,
    spec: &AnnulusSpec<T>,
    cfg: &ContourConfig<T>,
) -> Result<usize> {
    let spec = AnnulusSpec::new(spec.a, spec.b, spec.q_abs)?;
    let outer = count_zeros_disk(q, spec.outer_radius(), cfg)?;
    let inner = count_zeros_disk(q, spec.inner_radius(), cfg)?;
    outer.checked_sub(inner).ok_or_else(|| {
        ZerosError::InvalidParameter(format!(
            "inconsistent counts: {outer} zeros inside the outer circle, {inner} inside the inner one"
        ))
    })
}
