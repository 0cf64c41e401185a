//! Newton refinement of double zeros: solve `f = ∂f/∂x = 0` in `(q, x)`.

use super::{Result, ZeroSource, ZerosError};
use crate::scalar::{Cx, Real};
use crate::series::{theta_jet, trunc_jet, EvalConfig, ThetaJet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleZeroConfig<T> {
    /// Required `max(|f|, |∂f/∂x|)` at return.
    pub residual_tol: T,
    pub max_iter: usize,
    pub eval: EvalConfig<T>,
}

impl<T: Real> Default for DoubleZeroConfig<T> {
    fn default() -> Self {
        Self {
            residual_tol: T::tol(1e-11),
            max_iter: 100,
            eval: EvalConfig::default(),
        }
    }
}

/// A refined solution of the double-zero system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleZero<T> {
    pub q: Cx<T>,
    pub x: Cx<T>,
    /// `max(|f|, |∂f/∂x|)` at `(q, x)`.
    pub residual: T,
    /// `|∂²f/∂x²|` at `(q, x)`; bounded away from zero for a genuinely
    /// double (not triple) zero.
    pub fxx_abs: T,
    pub iterations: usize,
    pub source: ZeroSource,
}

const MAX_HALVINGS: usize = 40;
const POLISH_STEPS: usize = 3;

fn jet<T: Real>(
    q: Cx<T>,
    x: Cx<T>,
    truncation: Option<usize>,
    cfg: &DoubleZeroConfig<T>,
) -> Result<ThetaJet<T>> {
    Ok(match truncation {
        Some(k) => trunc_jet(q, x, k)?,
        None => theta_jet(q, x, &cfg.eval)?,
    })
}

fn residual<T: Real>(j: &ThetaJet<T>) -> T {
    j.f.norm().max(j.fx.norm())
}

/// Newton step `(δq, δx) = J⁻¹ F` for `F = (f, f_x)`,
/// `J = [[f_q, f_x], [f_xq, f_xx]]`.
fn newton_step<T: Real>(j: &ThetaJet<T>) -> Result<(Cx<T>, Cx<T>)> {
    let det = j.fq * j.fxx - j.fx * j.fxq;
    let scale = (j.fq.norm() * j.fxx.norm()).max(j.fx.norm() * j.fxq.norm());
    if !(det.norm() > T::epsilon() * T::epsilon() * scale) || scale == T::zero() {
        return Err(ZerosError::SingularJacobian);
    }
    let dq = (j.f * j.fxx - j.fx * j.fx) / det;
    let dx = (j.fq * j.fx - j.fxq * j.f) / det;
    if !(dq.re.is_finite() && dq.im.is_finite() && dx.re.is_finite() && dx.im.is_finite()) {
        return Err(ZerosError::SingularJacobian);
    }
    Ok((dq, dx))
}

/// Damped Newton on the `(f, ∂f/∂x)` system, `f = θ` or `f = θ_k` when
/// `truncation` is `Some(k)`.
pub fn refine_double_zero<T: Real>(
    q0: Cx<T>,
    x0: Cx<T>,
    truncation: Option<usize>,
    cfg: &DoubleZeroConfig<T>,
) -> Result<DoubleZero<T>> {
    let source = match truncation {
        Some(k) => ZeroSource::Truncation(k),
        None => ZeroSource::Full {
            tail_tol: cfg.eval.tail_tol.to_f64_lossy(),
        },
    };
    let (mut q, mut x) = (q0, x0);
    let mut j = jet(q, x, truncation, cfg)?;
    let mut res = residual(&j);
    let mut polished = 0usize;
    for it in 0..cfg.max_iter {
        let converged = res < cfg.residual_tol;
        if converged && polished >= POLISH_STEPS {
            return Ok(DoubleZero {
                q,
                x,
                residual: res,
                fxx_abs: j.fxx.norm(),
                iterations: it,
                source,
            });
        }
        let (dq, dx) = match newton_step(&j) {
            Ok(s) => s,
            Err(_) if converged => {
                polished = POLISH_STEPS;
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut lambda = T::one();
        let mut moved = false;
        for _ in 0..MAX_HALVINGS {
            let (qc, xc) = (q - dq * lambda, x - dx * lambda);
            // Moving off the series domain counts as a residual increase.
            if let Ok(jc) = jet(qc, xc, truncation, cfg) {
                let rc = residual(&jc);
                if rc < res || (converged && rc <= res) {
                    q = qc;
                    x = xc;
                    j = jc;
                    res = rc;
                    moved = true;
                    break;
                }
            }
            if converged {
                break;
            }
            lambda = lambda / T::lit(2.0);
        }
        if converged {
            polished += 1;
        } else if !moved {
            break;
        }
    }
    if res < cfg.residual_tol {
        return Ok(DoubleZero {
            q,
            x,
            residual: res,
            fxx_abs: j.fxx.norm(),
            iterations: cfg.max_iter,
            source,
        });
    }
    Err(ZerosError::NoConvergence {
        worst_residual: res.to_f64_lossy(),
    })
}

impl<T: Real> DoubleZero<T> {
    /// Conjugate solution: `θ(q̄, x̄) = conj θ(q, x)`.
    pub fn conj(&self) -> Self {
        Self {
            q: self.q.conj(),
            x: self.x.conj(),
            ..*self
        }
    }

    pub fn q_abs(&self) -> T {
        self.q.norm()
    }
}

/// Midpoint of the closest pair among the `⌈k/2⌉` smallest zeros of
/// `θ_k(q,·)`: a starting point for [`refine_double_zero`] near a spectral
/// value. The outer zeros of a truncation cluster and do not approximate
/// zeros of `θ`, so they are left out.
pub fn double_zero_seed<T: Real>(q: Cx<T>, k: usize) -> Result<Cx<T>> {
    let zs = super::roots_truncation(q, k)?;
    let inner = &zs.zeros[..k.div_ceil(2)];
    let (i, j) = super::closest_pair(inner)
        .ok_or_else(|| ZerosError::InvalidParameter("need at least two zeros".into()))?;
    Ok((zs.zeros[i] + zs.zeros[j]) * T::lit(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn truncation_two_double_zero_is_quarter() {
        // θ_2 = 1 + qx + q³x² has discriminant q²(1 − 4q): double zero at q = 1/4, x = −1/(2q²) = −8.
        let cfg = DoubleZeroConfig::default();
        let dz = refine_double_zero(c(0.26, 0.01), c(-7.5, 0.3), Some(2), &cfg).unwrap();
        assert!((dz.q - c(0.25, 0.0)).norm() < 1e-12, "{:?}", dz.q);
        assert!((dz.x - c(-8.0, 0.0)).norm() < 1e-9, "{:?}", dz.x);
    }

    #[test]
    fn first_positive_spectral_value() {
        let cfg = DoubleZeroConfig::default();
        let seed = double_zero_seed(c(0.31, 0.0), 20).unwrap();
        let dz = refine_double_zero(c(0.31, 0.0), seed, None, &cfg).unwrap();
        assert!((dz.q.re - 0.309249).abs() < 1e-6, "{:?}", dz.q);
        assert!(dz.q.im.abs() < 1e-12);
        assert!(dz.residual < 1e-11);
        assert!(dz.fxx_abs > 1e-6);
        // Fixed point.
        let again = refine_double_zero(dz.q, dz.x, None, &cfg).unwrap();
        assert!((again.q - dz.q).norm() < 1e-10 && (again.x - dz.x).norm() < 1e-10);
    }
}
