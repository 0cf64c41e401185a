//! Zeros of `θ(q,·)` and of its truncations: ordering by modulus, annulus
//! assignment and the strong-separation test, plus the solvers that produce
//! them (polynomial roots, argument-principle counts, continuation in `q`,
//! and Newton refinement of double zeros).

mod continuation;
mod contour;
mod double;
mod polynomial;

pub use continuation::{track_zero, TrackConfig};
pub use contour::{count_zeros_annulus, count_zeros_disk, ContourConfig};
pub use double::{double_zero_seed, refine_double_zero, DoubleZero, DoubleZeroConfig};
pub use polynomial::{closest_pair, roots_truncation, truncation_order_for_radius, zeros_of_theta};

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{half_pow, Cx, Real};
use crate::series::SeriesError;

/// Default number of zeros examined by separation checks.
pub const DEFAULT_KMAX: usize = 12;

/// Relative tolerance used when comparing a zero's modulus with an annulus
/// boundary.
pub const MODULUS_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZerosError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("root finder did not converge (worst relative residual {worst_residual:e})")]
    NoConvergence { worst_residual: f64 },
    #[error("a zero lies on (or too close to) the contour |x| = {radius}")]
    ZeroOnContour { radius: f64 },
    #[error("winding number did not settle on an integer (last value {last})")]
    NotAnInteger { last: f64 },
    #[error("lost the tracked zero near q = {q_re}{q_im:+}i")]
    PathLost { q_re: f64, q_im: f64 },
    #[error("singular Jacobian in double-zero Newton step")]
    SingularJacobian,
}

pub type Result<T> = std::result::Result<T, ZerosError>;

/// Which function a zero set (or a double zero) belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroSource {
    /// The degree-k truncation `θ_k`.
    Truncation(usize),
    /// The full series, evaluated with the given tail tolerance.
    Full { tail_tol: f64 },
}

/// Annulus `{ |q|^{-a} < |x| < |q|^{-b} }`, `0 < a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusSpec<T> {
    pub a: T,
    pub b: T,
    pub q_abs: T,
}

impl<T: Real> AnnulusSpec<T> {
    pub fn new(a: T, b: T, q_abs: T) -> Result<Self> {
        if !(a > T::zero() && a < b) {
            return Err(ZerosError::InvalidParameter(format!(
                "annulus exponents need 0 < a < b, got a = {a}, b = {b}"
            )));
        }
        if !(q_abs > T::zero() && q_abs < T::one()) {
            return Err(ZerosError::InvalidParameter(format!("|q| = {q_abs} not in (0, 1)")));
        }
        Ok(Self { a, b, q_abs })
    }

    pub fn inner_radius(&self) -> T {
        self.q_abs.powf(-self.a)
    }

    pub fn outer_radius(&self) -> T {
        self.q_abs.powf(-self.b)
    }

    pub fn contains(&self, x: Cx<T>) -> bool {
        let m = x.norm();
        m > self.inner_radius() && m < self.outer_radius()
    }
}

/// Zeros ordered by modulus with their annulus assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet<T> {
    pub q: Cx<T>,
    /// Ascending modulus, ties broken by argument.
    pub zeros: Vec<Cx<T>>,
    pub source: ZeroSource,
    /// `0` when the zero lies in the disk `|x| < |q|^{-3/2}`, otherwise the
    /// `k` with `|q|^{-(k-1/2)} < |x| < |q|^{-(k+1/2)}`.
    pub annulus_index: Vec<usize>,
    /// Strong separation of the listed zeros in modulus.
    pub separated: bool,
    /// Boundary ambiguities met while assigning annuli.
    pub warnings: Vec<String>,
}

/// Sorts zeros by modulus, then by principal argument.
pub fn sort_by_modulus<T: Real>(zeros: &mut [Cx<T>]) {
    zeros.sort_by(|a, b| {
        a.norm()
            .partial_cmp(&b.norm())
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.arg().partial_cmp(&b.arg()).unwrap_or(Ordering::Equal))
    });
}

/// Radius `|q|^{-(2k+1)/2}` separating the k-th and (k+1)-st zeros.
pub fn separating_radius<T: Real>(q_abs: T, k: usize) -> T {
    half_pow(q_abs, -(2 * k as i64 + 1))
}

/// Annulus index of a zero and whether its modulus sits within the
/// tolerance band of a boundary.
pub(crate) fn annulus_of<T: Real>(q_abs: T, x: Cx<T>) -> (usize, bool) {
    let m = x.norm();
    let tol = T::lit(MODULUS_REL_TOL);
    let mut j = 1usize;
    while m >= separating_radius(q_abs, j) && j < 100_000 {
        j += 1;
    }
    let near = |i: usize| {
        let r = separating_radius(q_abs, i);
        (m - r).abs() <= tol * r
    };
    let ambiguous = near(j) || (j > 1 && near(j - 1));
    (if j == 1 { 0 } else { j }, ambiguous)
}

impl<T: Real> ZeroSet<T> {
    /// Builds a zero set, sorting the zeros and checking separation on the
    /// first `check` zeros (all of them when `check` is `None`).
    pub fn new(q: Cx<T>, mut zeros: Vec<Cx<T>>, source: ZeroSource, check: Option<usize>) -> Self {
        sort_by_modulus(&mut zeros);
        let q_abs = q.norm();
        let mut warnings = Vec::new();
        let mut annulus_index = Vec::with_capacity(zeros.len());
        let mut separated = true;
        let n_check = check.unwrap_or(zeros.len()).min(zeros.len());
        for (i, z) in zeros.iter().enumerate() {
            let (k, ambiguous) = annulus_of(q_abs, *z);
            annulus_index.push(k);
            if i < n_check {
                if ambiguous {
                    warnings.push(format!(
                        "zero #{} (|x| = {}) is within {MODULUS_REL_TOL:e} of an annulus boundary",
                        i + 1,
                        z.norm()
                    ));
                    separated = false;
                }
                let expected = if i == 0 { 0 } else { i + 1 };
                if k != expected || z.norm() == T::zero() {
                    separated = false;
                }
            }
        }
        Self {
            q,
            zeros,
            source,
            annulus_index,
            separated,
            warnings,
        }
    }

    pub fn moduli(&self) -> Vec<T> {
        self.zeros.iter().map(|z| z.norm()).collect()
    }
}
