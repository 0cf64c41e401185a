//! Simultaneous (Aberth–Ehrlich) root finding for the truncations `θ_k`.
//!
//! The coefficients `q^{j(j+1)/2}` and the powers `x^j` span far more than
//! the exponent range of a float once `k` is a few dozen, so terms are
//! carried as a mantissa and a binary exponent. Scaling by powers of two is
//! exact, which keeps the evaluation as accurate as plain multiplication.

use num_complex::Complex;

use super::{sort_by_modulus, Result, ZeroSet, ZeroSource, ZerosError};
use crate::scalar::{Cx, Real};
use crate::series::{self, theta_jet, theta_tail_bound, trunc_coefficients, EvalConfig, MAX_TRUNCATION};

const MAX_ITER: usize = 500;
const POLISH_STEPS: usize = 3;
const RESIDUAL_REL_TOL: f64 = 1e-12;

/// `m · 2^e` with `m` kept near unit modulus.
#[derive(Debug, Clone, Copy)]
struct Scaled<T> {
    m: Cx<T>,
    e: i32,
}

impl<T: Real> Scaled<T> {
    fn new(z: Cx<T>) -> Self {
        Self { m: z, e: 0 }.normalized()
    }

    fn one() -> Self {
        Self {
            m: Complex::new(T::one(), T::zero()),
            e: 0,
        }
    }

    fn normalized(self) -> Self {
        let a = self.m.re.abs().max(self.m.im.abs());
        if a == T::zero() || !a.is_finite() {
            return self;
        }
        let shift = a.log2().floor().to_i32().unwrap_or(0);
        if shift == 0 {
            return self;
        }
        Self {
            m: self.m * pow2::<T>(-shift),
            e: self.e + shift,
        }
    }

    fn mul(self, o: Self) -> Self {
        Self {
            m: self.m * o.m,
            e: self.e + o.e,
        }
        .normalized()
    }

    fn is_zero(&self) -> bool {
        self.m.re == T::zero() && self.m.im == T::zero()
    }
}

fn pow2<T: Real>(e: i32) -> T {
    T::lit(2.0).powi(e)
}

/// Coefficients `q^{j(j+1)/2}` in scaled form.
fn scaled_coefficients<T: Real>(q: Cx<T>, k: usize) -> Vec<Scaled<T>> {
    let q_s = Scaled::new(q);
    let mut q_pow = Scaled::one();
    let mut c = Scaled::one();
    let mut out = Vec::with_capacity(k + 1);
    out.push(c);
    for _ in 1..=k {
        q_pow = q_pow.mul(q_s);
        c = c.mul(q_pow);
        out.push(c);
    }
    out
}

/// Evaluation of `p(z)` and `z p'(z)` sharing a common (dropped) scale
/// factor, together with the largest term modulus at the same scale.
struct ScaledEval<T> {
    p: Cx<T>,
    zdp: Cx<T>,
    max_term: T,
}

fn eval_scaled<T: Real>(coeffs: &[Scaled<T>], z: Cx<T>) -> ScaledEval<T> {
    let z_s = Scaled::new(z);
    let mut z_pow = Scaled::one();
    let mut terms = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        terms.push(c.mul(z_pow));
        z_pow = z_pow.mul(z_s);
    }
    let e_max = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.e)
        .max()
        .unwrap_or(0);
    let zero = Complex::new(T::zero(), T::zero());
    let mut p = zero;
    let mut zdp = zero;
    let mut max_term = T::zero();
    for (j, t) in terms.iter().enumerate() {
        if t.is_zero() {
            continue;
        }
        let v = t.m * pow2::<T>(t.e - e_max);
        p = p + v;
        zdp = zdp + v * T::from_usize_lossy(j);
        max_term = max_term.max(v.norm());
    }
    ScaledEval { p, zdp, max_term }
}

fn relative_residual<T: Real>(coeffs: &[Scaled<T>], z: Cx<T>) -> T {
    let ev = eval_scaled(coeffs, z);
    if ev.max_term == T::zero() {
        T::zero()
    } else {
        ev.p.norm() / ev.max_term
    }
}

/// Newton correction `p(z)/p'(z)`.
fn newton_ratio<T: Real>(coeffs: &[Scaled<T>], z: Cx<T>) -> Cx<T> {
    let ev = eval_scaled(coeffs, z);
    z * ev.p / ev.zdp
}

/// Deterministic starting points `−q^{-j}(1 + small perturbation)`.
fn initial_guesses<T: Real>(q: Cx<T>, k: usize) -> Vec<Cx<T>> {
    let ln_q = q.ln();
    (1..=k)
        .map(|j| {
            let phase = T::lit(2.399_963_229_728_653 * j as f64); // golden angle
            let pert = Complex::from_polar(T::lit(1e-3), phase);
            -(-ln_q * T::from_usize_lossy(j)).exp() * (Complex::new(T::one(), T::zero()) + pert)
        })
        .collect()
}

/// All `k` roots of `θ_k(q,·)`, sorted by modulus.
pub fn roots_truncation<T: Real>(q: Cx<T>, k: usize) -> Result<ZeroSet<T>> {
    let roots = raw_roots(q, k)?;
    Ok(ZeroSet::new(q, roots, ZeroSource::Truncation(k), None))
}

fn raw_roots<T: Real>(q: Cx<T>, k: usize) -> Result<Vec<Cx<T>>> {
    if k == 0 || k > MAX_TRUNCATION {
        return Err(ZerosError::InvalidParameter(format!(
            "truncation order must be in 1..={MAX_TRUNCATION}, got {k}"
        )));
    }
    if !(q.norm() > T::zero()) || !q.re.is_finite() || !q.im.is_finite() {
        return Err(ZerosError::InvalidParameter("q must be finite and non-zero".into()));
    }
    let coeffs = scaled_coefficients(q, k);
    if coeffs[k].is_zero() {
        return Err(ZerosError::InvalidParameter(format!(
            "leading coefficient of θ_{k} underflows at |q| = {}",
            q.norm()
        )));
    }
    let mut z = initial_guesses(q, k);
    let mut done = vec![false; k];
    let tiny = T::epsilon() * T::lit(4.0);
    for _ in 0..MAX_ITER {
        for i in 0..k {
            if done[i] {
                continue;
            }
            let w = newton_ratio(&coeffs, z[i]);
            let mut s = Complex::new(T::zero(), T::zero());
            for j in 0..k {
                if j != i {
                    s = s + (z[i] - z[j]).inv();
                }
            }
            let delta = w / (Complex::new(T::one(), T::zero()) - w * s);
            if !(delta.re.is_finite() && delta.im.is_finite()) {
                continue;
            }
            z[i] = z[i] - delta;
            if delta.norm() <= tiny * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|d| *d) {
            break;
        }
    }
    // Newton polish, kept only when it lowers the residual.
    let mut worst = T::zero();
    for zi in z.iter_mut() {
        let mut res = relative_residual(&coeffs, *zi);
        for _ in 0..POLISH_STEPS {
            let cand = *zi - newton_ratio(&coeffs, *zi);
            let r = relative_residual(&coeffs, cand);
            if r < res && cand.re.is_finite() && cand.im.is_finite() {
                *zi = cand;
                res = r;
            } else {
                break;
            }
        }
        worst = worst.max(res);
    }
    if !(worst < T::tol(RESIDUAL_REL_TOL)) {
        return Err(ZerosError::NoConvergence {
            worst_residual: worst.to_f64_lossy(),
        });
    }
    sort_by_modulus(&mut z);
    Ok(z)
}

/// Indices `(i, j)`, `i < j`, of the two zeros closest to each other
/// relative to their modulus.
pub fn closest_pair<T: Real>(zeros: &[Cx<T>]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, T)> = None;
    for i in 0..zeros.len() {
        for j in i + 1..zeros.len() {
            let d = (zeros[i] - zeros[j]).norm() / zeros[i].norm().max(zeros[j].norm());
            if best.is_none_or(|(_, _, b)| d < b) {
                best = Some((i, j, d));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Smallest truncation order whose neglected tail on `|x| = radius` is below
/// `1e-3` of the minimum of `|θ_k|` sampled on that circle.
pub fn truncation_order_for_radius<T: Real>(q: Cx<T>, radius: T) -> Result<usize> {
    let aq = q.norm();
    for k in 8..=MAX_TRUNCATION {
        let bound = match theta_tail_bound(aq, radius, k) {
            Ok(b) => b,
            Err(_) => continue,
        };
        let coeffs = trunc_coefficients(q, k)?;
        let samples = 64;
        let min = (0..samples)
            .map(|n| {
                let x = Complex::from_polar(
                    radius,
                    T::lit(2.0 * std::f64::consts::PI * n as f64 / samples as f64),
                );
                coeffs
                    .iter()
                    .rev()
                    .fold(Complex::new(T::zero(), T::zero()), |acc, c| acc * x + c)
                    .norm()
            })
            .fold(T::infinity(), T::min);
        if bound < T::lit(1e-3) * min {
            return Ok(k);
        }
    }
    Err(ZerosError::InvalidParameter(format!(
        "no truncation order up to {MAX_TRUNCATION} resolves |x| = {radius}"
    )))
}

/// Zeros of the full `θ(q,·)` inside the disk `|x| < radius`: roots of a
/// sufficiently high truncation, polished by Newton on the full series.
pub fn zeros_of_theta<T: Real>(q: Cx<T>, radius: T, cfg: &EvalConfig<T>) -> Result<Vec<Cx<T>>> {
    series::check_q(q)?;
    let k = truncation_order_for_radius(q, radius)?.max(12);
    let mut out = Vec::new();
    for z0 in raw_roots(q, k.min(MAX_TRUNCATION))? {
        if z0.norm() > radius * T::lit(1.5) {
            continue;
        }
        let mut z = z0;
        for _ in 0..8 {
            let jet = theta_jet(q, z, cfg)?;
            let step = jet.f / jet.fx;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            z = z - step;
            if step.norm() <= T::epsilon() * T::lit(4.0) * z.norm() {
                break;
            }
        }
        if z.norm() < radius {
            out.push(z);
        }
    }
    sort_by_modulus(&mut out);
    Ok(out)
}
