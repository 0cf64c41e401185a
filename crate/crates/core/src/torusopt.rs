//! Global minimisation of `(a, b) ↦ |θ_k(r e^{ib}, r^{-e} e^{ia})|²` on a
//! torus (or a cylinder when `b` is restricted).
//!
//! Each term of `θ_k` has modulus `r^{j(j+1)/2 - e·j}` and phase
//! `j·a + j(j+1)/2·b`, so the objective is a real trigonometric polynomial
//! with an exact gradient.

use std::cmp::Ordering;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{tri, Cx, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TorusError {
    #[error("invalid torus problem: {0}")]
    InvalidParameter(String),
}

/// Side length of the coarse scan grid.
pub const GRID_SIDE: usize = 128;
pub const DEFAULT_RESTARTS: usize = 20;
pub const DEFAULT_TOL: f64 = 1e-7;
const MAX_ITER: usize = 20_000;
const ARMIJO_C: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusProblem<T> {
    pub k: usize,
    /// `|q|`.
    pub r: T,
    /// `|x| = r^{-e}`.
    pub e: T,
    pub b_range: (T, T),
    pub a_range: (T, T),
}

impl<T: Real> TorusProblem<T> {
    /// Problem with `a` ranging over the full circle.
    pub fn new(k: usize, r: T, e: T, b_range: (T, T)) -> Result<Self, TorusError> {
        let p = Self {
            k,
            r,
            e,
            b_range,
            a_range: (T::zero(), T::TAU()),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), TorusError> {
        let bad = |m: String| Err(TorusError::InvalidParameter(m));
        if self.k == 0 || self.k > 64 {
            return bad(format!("truncation order {} not in 1..=64", self.k));
        }
        if !(self.r > T::zero() && self.r < T::one()) {
            return bad(format!("r = {} not in (0, 1)", self.r));
        }
        if !(self.e > T::zero() && self.e.is_finite()) {
            return bad(format!("e = {} must be positive", self.e));
        }
        for (name, (lo, hi)) in [("b", self.b_range), ("a", self.a_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return bad(format!("{name} range [{lo}, {hi}] is not an interval"));
            }
        }
        Ok(())
    }

    fn a_periodic(&self) -> bool {
        self.a_range.1 - self.a_range.0 >= T::TAU() * (T::one() - T::lit(1e-12))
    }

    fn project(&self, a: T, b: T) -> (T, T) {
        let a = if self.a_periodic() {
            let t = T::TAU();
            let w = (a - self.a_range.0) % t;
            self.a_range.0 + if w < T::zero() { w + t } else { w }
        } else {
            a.max(self.a_range.0).min(self.a_range.1)
        };
        (a, b.max(self.b_range.0).min(self.b_range.1))
    }

    /// Real term moduli `r^{j(j+1)/2 - e·j}`, `j = 0..=k`.
    fn moduli(&self) -> Vec<T> {
        let ln_r = self.r.ln();
        (0..=self.k)
            .map(|j| {
                let ex = T::lit(tri(j as u64) as f64) - self.e * T::from_usize_lossy(j);
                (ex * ln_r).exp()
            })
            .collect()
    }

    pub fn q_of(&self, b: T) -> Cx<T> {
        Complex::from_polar(self.r, b)
    }

    pub fn x_of(&self, a: T) -> Cx<T> {
        Complex::from_polar((-self.e * self.r.ln()).exp(), a)
    }
}

/// Outcome of [`minimize_on_torus`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusMinResult<T> {
    /// Minimum of `|θ_k|` (not its square).
    pub mu: T,
    pub a_star: T,
    pub b_star: T,
    pub restarts_used: usize,
    /// Spread `max − min` of the local minima `|θ_k|` found by the starts.
    pub spread: T,
}

impl<T: Real> TorusMinResult<T> {
    /// `arg(q x) = a* + b*` reduced to `[0, 2π)`.
    pub fn qx_phase(&self) -> T {
        let t = T::TAU();
        let w = (self.a_star + self.b_star) % t;
        if w < T::zero() {
            w + t
        } else {
            w
        }
    }
}

fn eval<T: Real>(moduli: &[T], a: T, b: T, grad: bool) -> (T, T, T) {
    let zero = Complex::new(T::zero(), T::zero());
    let (mut w, mut wa, mut wb) = (zero, zero, zero);
    for (j, &c) in moduli.iter().enumerate() {
        let tj = T::lit(tri(j as u64) as f64);
        let jj = T::from_usize_lossy(j);
        let t = Complex::from_polar(c, jj * a + tj * b);
        w = w + t;
        if grad {
            wa = wa + t * jj;
            wb = wb + t * tj;
        }
    }
    // d|w|²/dθ = 2 Re(conj(w) · i·w_θ) = −2 Im(conj(w) w_θ)
    let two = T::lit(2.0);
    let da = -two * (w.conj() * wa).im;
    let db = -two * (w.conj() * wb).im;
    (w.norm_sqr(), da, db)
}

/// `|θ_k(q(b), x(a))|²` and its partial derivatives in `a` and `b`.
pub fn objective_and_gradient<T: Real>(p: &TorusProblem<T>, a: T, b: T) -> (T, T, T) {
    eval(&p.moduli(), a, b, true)
}

/// Deterministic 64-bit SplitMix generator for start points.
#[derive(Debug, Clone)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

struct Local<T> {
    value: T,
    a: T,
    b: T,
}

fn lex<T: Real>(x: &Local<T>, y: &Local<T>) -> Ordering {
    x.value
        .partial_cmp(&y.value)
        .unwrap_or(Ordering::Equal)
        .then(x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal))
        .then(x.b.partial_cmp(&y.b).unwrap_or(Ordering::Equal))
}

/// Projected gradient descent with Barzilai–Borwein trial steps and Armijo
/// backtracking. The objective never increases, so the result is no worse
/// than the start. A periodic `a` is left unwrapped until the end.
fn descend<T: Real>(p: &TorusProblem<T>, moduli: &[T], a0: T, b0: T, tol: T) -> Local<T> {
    let periodic = p.a_periodic();
    let clamp = |a: T, b: T| {
        let a = if periodic { a } else { a.max(p.a_range.0).min(p.a_range.1) };
        (a, b.max(p.b_range.0).min(p.b_range.1))
    };
    let (mut a, mut b) = clamp(a0, b0);
    let (mut f, mut ga, mut gb) = eval(moduli, a, b, true);
    let mut step = T::one() / (T::one() + ga.abs() + gb.abs());
    let mut prev: Option<(T, T, T, T)> = None;
    for _ in 0..MAX_ITER {
        let (pa, pb) = clamp(a - ga, b - gb);
        let (ra, rb) = (a - pa, b - pb);
        if (ra * ra + rb * rb).sqrt() < tol {
            break;
        }
        if let Some((a_old, b_old, ga_old, gb_old)) = prev {
            let (sa, sb) = (a - a_old, b - b_old);
            let (ya, yb) = (ga - ga_old, gb - gb_old);
            let sy = sa * ya + sb * yb;
            if sy > T::zero() {
                step = (sa * sa + sb * sb) / sy;
            }
        }
        let mut t = step;
        let mut moved = false;
        for _ in 0..60 {
            let (na, nb) = clamp(a - t * ga, b - t * gb);
            let nf = eval(moduli, na, nb, false).0;
            let decrease = ga * (na - a) + gb * (nb - b);
            if nf <= f + T::lit(ARMIJO_C) * decrease && nf <= f {
                prev = Some((a, b, ga, gb));
                (f, ga, gb) = eval(moduli, na, nb, true);
                a = na;
                b = nb;
                moved = true;
                break;
            }
            t = t / T::lit(2.0);
        }
        if !moved {
            break;
        }
    }
    let (a, b) = p.project(a, b);
    Local { value: f, a, b }
}

fn grid_points<T: Real>(lo: T, hi: T, n: usize, periodic: bool) -> Vec<T> {
    let denom = if periodic || n == 1 { n } else { n - 1 };
    (0..n)
        .map(|i| lo + (hi - lo) * T::from_usize_lossy(i) / T::from_usize_lossy(denom.max(1)))
        .collect()
}

/// Minimum of `|θ_k|²` over an `n_a × n_b` grid: `(value, a, b)`. `a` is
/// sampled with the periodic endpoint dropped, `b` with both endpoints.
pub fn grid_scan<T: Real>(p: &TorusProblem<T>, n_a: usize, n_b: usize) -> (T, T, T) {
    let moduli = p.moduli();
    let a_pts = grid_points(p.a_range.0, p.a_range.1, n_a, p.a_periodic());
    let b_pts = grid_points(p.b_range.0, p.b_range.1, n_b, false);
    let best = b_pts
        .par_iter()
        .map(|&b| {
            a_pts
                .iter()
                .map(|&a| Local {
                    value: eval(&moduli, a, b, false).0,
                    a,
                    b,
                })
                .min_by(lex)
                .expect("non-empty grid")
        })
        .collect::<Vec<_>>()
        .into_iter()
        .min_by(lex)
        .expect("non-empty grid");
    (best.value, best.a, best.b)
}

/// Independent lower-bound style check: minimum of `|θ_k|` on an `n × n`
/// grid, without any local descent.
pub fn brute_force_min<T: Real>(p: &TorusProblem<T>, n: usize) -> T {
    grid_scan(p, n, n).0.sqrt()
}

/// Multi-start minimisation of `|θ_k|²` on the torus.
///
/// `restarts` starts come from [`SplitMix64`] seeded with `seed` (two draws
/// per start, scaled to the `a` and `b` ranges); one more start is the best
/// cell of a 128×128 scan. The winner is chosen by `(value, a, b)`.
pub fn minimize_on_torus<T: Real>(
    p: &TorusProblem<T>,
    seed: u64,
    restarts: usize,
    tol: T,
) -> Result<TorusMinResult<T>, TorusError> {
    p.validate()?;
    let moduli = p.moduli();
    let mut rng = SplitMix64::new(seed);
    let mut starts: Vec<(T, T)> = (0..restarts)
        .map(|_| {
            let ua = T::lit(rng.next_f64());
            let ub = T::lit(rng.next_f64());
            (
                p.a_range.0 + ua * (p.a_range.1 - p.a_range.0),
                p.b_range.0 + ub * (p.b_range.1 - p.b_range.0),
            )
        })
        .collect();
    let (_, ga, gb) = grid_scan(p, GRID_SIDE, GRID_SIDE);
    starts.push((ga, gb));
    let locals: Vec<Local<T>> = starts
        .par_iter()
        .map(|&(a, b)| descend(p, &moduli, a, b, tol))
        .collect();
    let best = locals.iter().min_by(|x, y| lex(x, y)).expect("at least the grid start");
    let (lo, hi) = locals.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), l| {
        let m = l.value.max(T::zero()).sqrt();
        (lo.min(m), hi.max(m))
    });
    Ok(TorusMinResult {
        mu: best.value.max(T::zero()).sqrt(),
        a_star: best.a,
        b_star: best.b,
        restarts_used: locals.len(),
        spread: hi - lo,
    })
}
