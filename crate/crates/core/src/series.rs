//! Evaluation of the partial theta function `θ(q,x) = Σ_{j≥0} q^{j(j+1)/2} x^j`,
//! its truncations `θ_k`, the bilateral series `Θ*` in both series and
//! triple-product form, and the negative-index tail `G` with `θ = Θ* − G`.
//!
//! Every infinite sum is cut off by a geometric majorant on the moduli of
//! the neglected terms, so each [`TailedEvaluation`] carries an upper bound
//! on the truncation error it committed.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{is_finite, tri, Cx, Real};

/// Largest accepted `|q|`.
pub const MAX_ABS_Q: f64 = 0.99;

/// Largest truncation order accepted by [`theta_trunc`] and friends.
pub const MAX_TRUNCATION: usize = 64;

/// Powers of `q` are re-derived from `exp/log` after this many products.
const RENORM_EVERY: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("tail bound {bound:e} still above tolerance after {terms} terms")]
    TailNotConverged { terms: usize, bound: f64 },
    #[error("geometric majorant does not close (ratio {ratio} >= 1)")]
    MajorantDiverges { ratio: f64 },
    #[error("division by zero: x = 0")]
    DivisionByZero,
    #[error("non-finite value produced")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, SeriesError>;

/// Tail control for the infinite sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig<T> {
    /// Target upper bound on the neglected tail (absolute).
    pub tail_tol: T,
    /// Hard cap on the number of terms.
    pub max_terms: usize,
}

impl<T: Real> Default for EvalConfig<T> {
    fn default() -> Self {
        Self {
            tail_tol: T::tol(1e-14),
            max_terms: 512,
        }
    }
}

impl<T: Real> EvalConfig<T> {
    pub fn new(tail_tol: T, max_terms: usize) -> Result<Self> {
        let cfg = Self {
            tail_tol,
            max_terms,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tol > T::zero()) || !self.tail_tol.is_finite() {
            return Err(SeriesError::InvalidParameter(format!(
                "tail_tol must be positive, got {}",
                self.tail_tol
            )));
        }
        if self.max_terms < 8 {
            return Err(SeriesError::InvalidParameter(format!(
                "max_terms must be at least 8, got {}",
                self.max_terms
            )));
        }
        Ok(())
    }
}

/// A complex value together with a bound on the truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailedEvaluation<T> {
    pub value: Cx<T>,
    pub tail_bound: T,
    pub terms_used: usize,
}

impl<T: Real> TailedEvaluation<T> {
    fn exact(value: Cx<T>, terms_used: usize) -> Self {
        Self {
            value,
            tail_bound: T::zero(),
            terms_used,
        }
    }
}

/// Values of `f`, `∂f/∂x`, `∂²f/∂x²`, `∂f/∂q` and `∂²f/∂x∂q` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaJet<T> {
    pub f: Cx<T>,
    pub fx: Cx<T>,
    pub fxx: Cx<T>,
    pub fq: Cx<T>,
    pub fxq: Cx<T>,
    /// Largest tail bound over the five components (zero for truncations).
    pub tail_bound: T,
}

pub(crate) fn check_q<T: Real>(q: Cx<T>) -> Result<()> {
    let r = q.norm();
    if !is_finite(q) || !(r > T::zero()) || r > T::lit(MAX_ABS_Q) {
        return Err(SeriesError::InvalidParameter(format!(
            "|q| must lie in (0, {MAX_ABS_Q}], got {r}"
        )));
    }
    Ok(())
}

fn check_x<T: Real>(x: Cx<T>) -> Result<()> {
    if !is_finite(x) {
        return Err(SeriesError::InvalidParameter("x is not finite".into()));
    }
    Ok(())
}

fn finite_or_err<T: Real>(z: Cx<T>) -> Result<Cx<T>> {
    if is_finite(z) {
        Ok(z)
    } else {
        Err(SeriesError::NonFinite)
    }
}

/// Sums `Σ_j w_i(j) q^{j(j+1)/2} x^j` for several weights at once.
///
/// Every weight must be a polynomial in `j` with non-negative coefficients,
/// so that `w(j+1)/w(j)` is non-increasing wherever `w(j) > 0`; combined with
/// the decreasing modulus ratio `|q|^{j+1}|x|` this makes the tail after the
/// current term bounded by `w(j) m_j ρ/(1-ρ)`.
fn weighted_theta<T: Real, const N: usize>(
    q: Cx<T>,
    x: Cx<T>,
    cfg: &EvalConfig<T>,
    weights: [fn(u64) -> f64; N],
    targets: [T; N],
) -> Result<([Cx<T>; N], [T; N], usize)> {
    let aq = q.norm();
    let ax = x.norm();
    let ln_q = q.ln();
    let ln_x = x.ln();

    let mut acc = [Cx::<T>::new(T::zero(), T::zero()); N];
    let mut bounds = [T::infinity(); N];

    let mut term = Cx::new(T::one(), T::zero());
    let mut modulus = T::one();
    let mut q_pow = Cx::new(T::one(), T::zero()); // q^j
    let mut aq_pow = T::one(); // |q|^j

    let mut j = 0usize;
    loop {
        let jj = j as u64;
        for i in 0..N {
            acc[i] = acc[i] + term * T::lit(weights[i](jj));
        }

        aq_pow = aq_pow * aq; // |q|^{j+1}
        let rho0 = aq_pow * ax;
        if rho0 < T::one() {
            let mut done = true;
            for i in 0..N {
                let w = T::lit(weights[i](jj));
                bounds[i] = if modulus == T::zero() {
                    T::zero()
                } else if w > T::zero() {
                    let rho = T::lit(weights[i](jj + 1)) / w * rho0;
                    if rho < T::one() {
                        w * modulus * rho / (T::one() - rho)
                    } else {
                        T::infinity()
                    }
                } else {
                    T::infinity()
                };
                done &= bounds[i] <= targets[i];
            }
            if done {
                for a in acc.iter() {
                    finite_or_err(*a)?;
                }
                return Ok((acc, bounds, j + 1));
            }
        }

        j += 1;
        if j >= cfg.max_terms {
            let worst = bounds.iter().fold(T::zero(), |m, b| m.max(*b));
            return Err(SeriesError::TailNotConverged {
                terms: j,
                bound: worst.to_f64_lossy(),
            });
        }

        if j.is_multiple_of(RENORM_EVERY) {
            let jt = T::from_usize_lossy(j);
            let nt = T::lit(tri(j as u64) as f64);
            q_pow = (ln_q * jt).exp();
            term = (ln_q * nt + ln_x * jt).exp();
            modulus = (nt * aq.ln() + jt * ax.ln()).exp();
            aq_pow = (jt * aq.ln()).exp();
        } else {
            q_pow = q_pow * q;
            term = term * q_pow * x;
            modulus = modulus * rho0;
        }
    }
}

/// `θ(q,x)` with a certified cutoff.
pub fn theta<T: Real>(q: Cx<T>, x: Cx<T>, cfg: &EvalConfig<T>) -> Result<TailedEvaluation<T>> {
    cfg.validate()?;
    check_q(q)?;
    check_x(x)?;
    if x.norm() == T::zero() {
        return Ok(TailedEvaluation::exact(Complex::new(T::one(), T::zero()), 1));
    }
    let ([value], [tail_bound], terms_used) =
        weighted_theta(q, x, cfg, [|_| 1.0], [cfg.tail_tol])?;
    Ok(TailedEvaluation {
        value,
        tail_bound,
        terms_used,
    })
}

/// `∂θ/∂x (q,x) = Σ j q^{j(j+1)/2} x^{j-1}`.
pub fn theta_dx<T: Real>(q: Cx<T>, x: Cx<T>, cfg: &EvalConfig<T>) -> Result<TailedEvaluation<T>> {
    cfg.validate()?;
    check_q(q)?;
    check_x(x)?;
    let ax = x.norm();
    if ax == T::zero() {
        return Ok(TailedEvaluation::exact(q, 2));
    }
    let ([sx], [bound], terms_used) =
        weighted_theta(q, x, cfg, [|j| j as f64], [cfg.tail_tol * ax])?;
    Ok(TailedEvaluation {
        value: finite_or_err(sx / x)?,
        tail_bound: bound / ax,
        terms_used,
    })
}

/// `θ` and `∂θ/∂x` from a single pass over the series.
pub fn theta_and_dx<T: Real>(
    q: Cx<T>,
    x: Cx<T>,
    cfg: &EvalConfig<T>,
) -> Result<(TailedEvaluation<T>, TailedEvaluation<T>)> {
    cfg.validate()?;
    check_q(q)?;
    check_x(x)?;
    let ax = x.norm();
    if ax == T::zero() {
        return Ok((
            TailedEvaluation::exact(Complex::new(T::one(), T::zero()), 1),
            TailedEvaluation::exact(q, 2),
        ));
    }
    let ([s0, s1], [b0, b1], terms_used) = weighted_theta(
        q,
        x,
        cfg,
        [|_| 1.0, |j| j as f64],
        [cfg.tail_tol, cfg.tail_tol * ax],
    )?;
    Ok((
        TailedEvaluation {
            value: s0,
            tail_bound: b0,
            terms_used,
        },
        TailedEvaluation {
            value: finite_or_err(s1 / x)?,
            tail_bound: b1 / ax,
            terms_used,
        },
    ))
}

/// All first and second derivatives needed by the double-zero Newton
/// system, for the full series.
pub fn theta_jet<T: Real>(q: Cx<T>, x: Cx<T>, cfg: &EvalConfig<T>) -> Result<ThetaJet<T>> {
    cfg.validate()?;
    check_q(q)?;
    check_x(x)?;
    let ax = x.norm();
    let aq = q.norm();
    if ax == T::zero() {
        let one = Complex::new(T::one(), T::zero());
        return Ok(ThetaJet {
            f: one,
            fx: q,
            fxx: q * q * q * T::lit(2.0),
            fq: Complex::new(T::zero(), T::zero()),
            fxq: one,
            tail_bound: T::zero(),
        });
    }
    let tol = cfg.tail_tol;
    let ([s0, s1, s2, sq, sxq], b, _) = weighted_theta(
        q,
        x,
        cfg,
        [
            |_| 1.0,
            |j| j as f64,
            |j| (j * j.saturating_sub(1)) as f64,
            |j| tri(j) as f64,
            |j| (j * tri(j)) as f64,
        ],
        [tol, tol * ax, tol * ax * ax, tol * aq, tol * ax * aq],
    )?;
    let jet = ThetaJet {
        f: s0,
        fx: s1 / x,
        fxx: s2 / (x * x),
        fq: sq / q,
        fxq: sxq / (x * q),
        tail_bound: b[0]
            .max(b[1] / ax)
            .max(b[2] / (ax * ax))
            .max(b[3] / aq)
            .max(b[4] / (ax * aq)),
    };
    for z in [jet.f, jet.fx, jet.fxx, jet.fq, jet.fxq] {
        finite_or_err(z)?;
    }
    Ok(jet)
}

fn check_k(k: usize) -> Result<()> {
    if k > MAX_TRUNCATION {
        return Err(SeriesError::InvalidParameter(format!(
            "truncation order {k} exceeds {MAX_TRUNCATION}"
        )));
    }
    Ok(())
}

/// Coefficients `q^{j(j+1)/2}`, `j = 0..=k`, of the truncation `θ_k` in `x`.
pub fn trunc_coefficients<T: Real>(q: Cx<T>, k: usize) -> Result<Vec<Cx<T>>> {
    check_k(k)?;
    let mut out = Vec::with_capacity(k + 1);
    let mut c = Complex::new(T::one(), T::zero());
    let mut q_pow = Complex::new(T::one(), T::zero());
    out.push(c);
    for _ in 1..=k {
        q_pow = q_pow * q;
        c = c * q_pow;
        out.push(c);
    }
    Ok(out)
}

fn horner<T: Real>(coeffs: &[Cx<T>], x: Cx<T>) -> Cx<T> {
    coeffs
        .iter()
        .rev()
        .fold(Complex::new(T::zero(), T::zero()), |acc, c| acc * x + c)
}

/// The k-th truncation `θ_k(q,x) = Σ_{j=0}^{k} q^{j(j+1)/2} x^j`.
pub fn theta_trunc<T: Real>(q: Cx<T>, x: Cx<T>, k: usize) -> Result<Cx<T>> {
    let coeffs = trunc_coefficients(q, k)?;
    finite_or_err(horner(&coeffs, x))
}

/// Exact jet of the truncation `θ_k`.
pub fn trunc_jet<T: Real>(q: Cx<T>, x: Cx<T>, k: usize) -> Result<ThetaJet<T>> {
    check_k(k)?;
    let zero = Complex::new(T::zero(), T::zero());
    let c = trunc_coefficients(q, k)?;
    // d[j] = q^{n_j - 1} for j >= 1, built as c[j-1] q^{j-1}.
    let mut d = vec![zero; k + 1];
    let mut q_pow = Complex::new(T::one(), T::zero());
    for j in 1..=k {
        d[j] = c[j - 1] * q_pow;
        q_pow = q_pow * q;
    }
    let w = |j: usize| T::from_usize_lossy(j);
    let fx: Vec<_> = (1..=k).map(|j| c[j] * w(j)).collect();
    let fxx: Vec<_> = (2..=k).map(|j| c[j] * w(j * (j - 1))).collect();
    let fq: Vec<_> = (0..=k)
        .map(|j| if j == 0 { zero } else { d[j] * w(tri(j as u64) as usize) })
        .collect();
    let fxq: Vec<_> = (1..=k).map(|j| d[j] * w(j * tri(j as u64) as usize)).collect();
    let jet = ThetaJet {
        f: horner(&c, x),
        fx: horner(&fx, x),
        fxx: horner(&fxx, x),
        fq: horner(&fq, x),
        fxq: horner(&fxq, x),
        tail_bound: T::zero(),
    };
    for z in [jet.f, jet.fx, jet.fxx, jet.fq, jet.fxq] {
        finite_or_err(z)?;
    }
    Ok(jet)
}

/// Upper bound on `|θ_k^•(q,x)| = |Σ_{j>k} q^{j(j+1)/2} x^j|` valid for all
/// `q`, `x` of the given moduli.
pub fn theta_tail_bound<T: Real>(abs_q: T, abs_x: T, k: usize) -> Result<T> {
    if !(abs_q > T::zero() && abs_q < T::one()) || !(abs_x >= T::zero()) {
        return Err(SeriesError::InvalidParameter(format!(
            "need 0 < |q| < 1 and |x| >= 0, got |q| = {abs_q}, |x| = {abs_x}"
        )));
    }
    if abs_x == T::zero() {
        return Ok(T::zero());
    }
    let ratio0 = (T::from_usize_lossy(k + 1) * abs_q.ln()).exp() * abs_x;
    if ratio0 >= T::one() {
        return Err(SeriesError::MajorantDiverges {
            ratio: ratio0.to_f64_lossy(),
        });
    }
    let j0 = k + 1;
    let mut m = (T::lit(tri(j0 as u64) as f64) * abs_q.ln()
        + T::from_usize_lossy(j0) * abs_x.ln())
    .exp();
    let mut sum = T::zero();
    let mut aq_pow = (T::from_usize_lossy(j0) * abs_q.ln()).exp(); // |q|^j
    let cutoff = T::lit(1e-17);
    for _ in 0..200 {
        sum = sum + m;
        aq_pow = aq_pow * abs_q;
        let rho = aq_pow * abs_x;
        if m <= cutoff * sum || m == T::zero() {
            return Ok(sum + m * rho / (T::one() - rho));
        }
        m = m * rho;
    }
    Ok(sum + m / (T::one() - aq_pow * abs_x))
}

/// Sum of `q^{j(j-1)/2} x^{-j}` for `j >= 1`; no closure precondition.
fn g_sum<T: Real>(q: Cx<T>, x: Cx<T>, cfg: &EvalConfig<T>) -> Result<TailedEvaluation<T>> {
    let aq = q.norm();
    let ax = x.norm();
    let inv_x = Complex::new(T::one(), T::zero()) / x;
    let ln_q = q.ln();
    let ln_inv_x = -x.ln();

    let mut term = inv_x; // j = 1
    let mut modulus = T::one() / ax;
    let mut q_pow = Complex::new(T::one(), T::zero()); // q^{j-1}
    let mut aq_pow = T::one(); // |q|^{j-1}
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut bound = T::infinity();
    let mut j = 1usize;
    loop {
        acc = acc + term;
        aq_pow = aq_pow * aq; // |q|^j
        let rho = aq_pow / ax;
        if rho < T::one() {
            bound = modulus * rho / (T::one() - rho);
            if bound <= cfg.tail_tol {
                return Ok(TailedEvaluation {
                    value: finite_or_err(acc)?,
                    tail_bound: bound,
                    terms_used: j,
                });
            }
        }
        j += 1;
        if j > cfg.max_terms {
            return Err(SeriesError::TailNotConverged {
                terms: j - 1,
                bound: bound.to_f64_lossy(),
            });
        }
        if j.is_multiple_of(RENORM_EVERY) {
            let jt = T::from_usize_lossy(j);
            let nt = T::lit(tri(j as u64 - 1) as f64);
            q_pow = (ln_q * (jt - T::one())).exp();
            term = (ln_q * nt + ln_inv_x * jt).exp();
            modulus = (nt * aq.ln() - jt * ax.ln()).exp();
            aq_pow = ((jt - T::one()) * aq.ln()).exp();
        } else {
            q_pow = q_pow * q;
            term = term * q_pow * inv_x;
            modulus = modulus * rho;
        }
    }
}

/// `G(q,x) = Σ_{j≥1} q^{j(j-1)/2} x^{-j}`, so that `θ = Θ* − G`.
pub fn g_tail<T: Real>(q: Cx<T>, x: Cx<T>, cfg: &EvalConfig<T>) -> Result<TailedEvaluation<T>> {
    cfg.validate()?;
    check_q(q)?;
    check_x(x)?;
    let ax = x.norm();
    if ax == T::zero() {
        return Err(SeriesError::DivisionByZero);
    }
    let ratio = q.norm() / ax;
    if ratio >= T::one() {
        return Err(SeriesError::MajorantDiverges {
            ratio: ratio.to_f64_lossy(),
        });
    }
    g_sum(q, x, cfg)
}

/// `Θ*(q,x) = Σ_{j∈ℤ} q^{j(j+1)/2} x^j` summed as `θ + G`.
pub fn bilateral_series<T: Real>(
    q: Cx<T>,
    x: Cx<T>,
    cfg: &EvalConfig<T>,
) -> Result<TailedEvaluation<T>> {
    cfg.validate()?;
    check_q(q)?;
    check_x(x)?;
    if x.norm() == T::zero() {
        return Err(SeriesError::DivisionByZero);
    }
    let half = EvalConfig {
        tail_tol: cfg.tail_tol / T::lit(2.0),
        ..*cfg
    };
    let pos = theta(q, x, &half)?;
    let neg = g_sum(q, x, &half)?;
    Ok(TailedEvaluation {
        value: pos.value + neg.value,
        tail_bound: pos.tail_bound + neg.tail_bound,
        terms_used: pos.terms_used + neg.terms_used,
    })
}

/// `Θ*(q,x) = Π_{m≥1} (1 − q^m)(1 + x q^m)(1 + q^{m−1}/x)`.
///
/// Stops once the neglected factors, in aggregate, differ from 1 by less than
/// `tail_tol` (relative); the reported tail bound is that relative bound
/// times the modulus of the partial product.
pub fn triple_product<T: Real>(
    q: Cx<T>,
    x: Cx<T>,
    cfg: &EvalConfig<T>,
) -> Result<TailedEvaluation<T>> {
    cfg.validate()?;
    check_q(q)?;
    check_x(x)?;
    let ax = x.norm();
    if ax == T::zero() {
        return Err(SeriesError::DivisionByZero);
    }
    let aq = q.norm();
    let one = Complex::new(T::one(), T::zero());
    let inv_x = one / x;
    let ln_q = q.ln();

    let mut prod = one;
    let mut q_prev = one; // q^{m-1}
    let mut aq_prev = T::one(); // |q|^{m-1}
    let mut rel = T::infinity();
    for m in 1..=cfg.max_terms {
        let q_m = if m % RENORM_EVERY == 0 {
            (ln_q * T::from_usize_lossy(m)).exp()
        } else {
            q_prev * q
        };
        prod = prod * (one - q_m) * (one + x * q_m) * (one + q_prev * inv_x);
        q_prev = q_m;
        aq_prev = aq_prev * aq;
        // e_{m+1} bounds |factor_{m+1} − 1|, and e_{i+1} <= |q| e_i.
        let aq_next = aq_prev * aq;
        let e_next = (T::one() + aq_next) * (T::one() + ax * aq_next) * (T::one() + aq_prev / ax)
            - T::one();
        let s = e_next / (T::one() - aq);
        rel = s.exp() - T::one();
        if rel <= cfg.tail_tol {
            return Ok(TailedEvaluation {
                value: finite_or_err(prod)?,
                tail_bound: prod.norm() * rel,
                terms_used: m,
            });
        }
    }
    Err(SeriesError::TailNotConverged {
        terms: cfg.max_terms,
        bound: rel.to_f64_lossy(),
    })
}
