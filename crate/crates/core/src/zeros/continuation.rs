//! Continuation of a single zero of `θ(q,·)` along a path in `q`.

use super::{Result, ZerosError};
use crate::scalar::{Cx, Real};
use crate::series::{theta_jet, EvalConfig, ThetaJet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackConfig<T> {
    /// Absolute residual `|θ|` required at every returned point.
    pub residual_tol: T,
    /// Total number of segment bisections allowed.
    pub max_subdivisions: usize,
    pub eval: EvalConfig<T>,
}

impl<T: Real> Default for TrackConfig<T> {
    fn default() -> Self {
        Self {
            residual_tol: T::tol(1e-10),
            max_subdivisions: 1 << 16,
            eval: EvalConfig::default(),
        }
    }
}

const NEWTON_ITERS: usize = 30;
const MAX_HALVINGS: usize = 40;
/// Kantorovich-style acceptance: `|δ₀|·|θ''|/|θ'|` must stay below this.
const KANTOROVICH_LIMIT: f64 = 0.25;

fn residual_floor<T: Real>(jet: &ThetaJet<T>, tol: T) -> T {
    tol.max(T::lit(64.0) * jet.tail_bound)
}

/// Damped Newton in `x` at fixed `q`. Returns the zero when the first step
/// passes the Kantorovich test and the iteration reaches the residual.
fn corrector<T: Real>(q: Cx<T>, x0: Cx<T>, cfg: &TrackConfig<T>, check_basin: bool) -> Result<Option<Cx<T>>> {
    let mut x = x0;
    let mut jet = theta_jet(q, x, &cfg.eval)?;
    let first = jet.f / jet.fx;
    if check_basin {
        let h = first.norm() * jet.fxx.norm() / jet.fx.norm();
        if !(h <= T::lit(KANTOROVICH_LIMIT)) {
            return Ok(None);
        }
    }
    for _ in 0..NEWTON_ITERS {
        if jet.f.norm() <= residual_floor(&jet, cfg.residual_tol) {
            return Ok(Some(x));
        }
        let step = jet.f / jet.fx;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return Ok(None);
        }
        let mut lambda = T::one();
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let cand = x - step * lambda;
            let cj = theta_jet(q, cand, &cfg.eval)?;
            if cj.f.norm() < jet.f.norm() {
                x = cand;
                jet = cj;
                accepted = true;
                break;
            }
            lambda = lambda / T::lit(2.0);
        }
        if !accepted {
            break;
        }
    }
    Ok((jet.f.norm() <= residual_floor(&jet, cfg.residual_tol)).then_some(x))
}

/// Follows the zero starting at `x_start` (a zero of `θ(q_path[0],·)`) along
/// the polyline `q_path`, returning one zero per path point.
///
/// Each step uses the tangent predictor `dx/dq = −θ_q/θ_x` and a Newton
/// corrector; a step whose corrector is not safely contracting is bisected.
/// Collisions with another zero exhaust the bisection budget and produce
/// [`ZerosError::PathLost`] rather than an arbitrary branch choice.
pub fn track_zero<T: Real>(
    q_path: &[Cx<T>],
    x_start: Cx<T>,
    cfg: &TrackConfig<T>,
) -> Result<Vec<Cx<T>>> {
    let Some(&q0) = q_path.first() else {
        return Ok(Vec::new());
    };
    let jet = theta_jet(q0, x_start, &cfg.eval)?;
    if jet.f.norm() > residual_floor(&jet, cfg.residual_tol) {
        return Err(ZerosError::InvalidParameter(format!(
            "x_start is not a zero: |θ| = {}",
            jet.f.norm()
        )));
    }
    let mut out = vec![x_start];
    let mut subdivisions = 0usize;
    let mut x = x_start;
    for w in q_path.windows(2) {
        let (qa, qb) = (w[0], w[1]);
        if qa == qb {
            out.push(x);
            continue;
        }
        // Progress along [qa, qb] as a parameter t ∈ [0, 1].
        let mut t = T::zero();
        let mut dt = T::one();
        while t < T::one() {
            let t_next = (t + dt).min(T::one());
            let q_from = qa + (qb - qa) * t;
            let q_to = qa + (qb - qa) * t_next;
            let jet = theta_jet(q_from, x, &cfg.eval)?;
            let pred = x - jet.fq / jet.fx * (q_to - q_from);
            let ok = if pred.re.is_finite() && pred.im.is_finite() {
                corrector(q_to, pred, cfg, true)?
            } else {
                None
            };
            match ok {
                Some(x_new) => {
                    x = x_new;
                    t = t_next;
                    dt = dt * T::lit(2.0);
                }
                None => {
                    subdivisions += 1;
                    dt = dt / T::lit(2.0);
                    if subdivisions > cfg.max_subdivisions || dt < T::epsilon() {
                        return Err(ZerosError::PathLost {
                            q_re: q_to.re.to_f64_lossy(),
                            q_im: q_to.im.to_f64_lossy(),
                        });
                    }
                }
            }
        }
        out.push(x);
    }
    Ok(out)
}
