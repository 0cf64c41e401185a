//! Spectral values: parameters `q` at which `θ(q,·)` or a truncation
//! `θ_k(q,·)` has a multiple zero.
//!
//! Resultants are only a scan indicator. Every reported value comes from
//! Newton's method on the system `f = ∂f/∂x = 0` and carries its residual.

mod classify;
mod figure;
mod refine;
mod resultant;
mod scan;

pub use classify::{classify_pair, CLASSIFY_TOL_REL};
pub use figure::{render_svg, FigureOptions};
pub use refine::{refine_to_full_theta, DEFAULT_K_SCHEDULE, DEFAULT_STABILITY_TOL};
pub use resultant::{resultant_at, resultant_raw, sylvester_matrix, RawResultant, MAX_RESULTANT_ORDER, MIN_RESULTANT_ORDER};
pub use scan::{scan_truncation_spectrum, RegionSpec};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::zeros::{ZeroSource, ZerosError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error(transparent)]
    Zeros(#[from] ZerosError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("resultant 2^{exponent} is outside the f64 range")]
    Overflow { exponent: i64 },
    #[error("another zero has modulus within the tolerance band of |x*| = {modulus}")]
    AmbiguousModulus { modulus: f64 },
    #[error("refinement did not stabilise (last change in q: {last_change:e})")]
    NotStabilized { last_change: f64 },
}

/// A located double zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralValue {
    pub q_star: Complex64,
    /// The double zero.
    pub x_star: Complex64,
    /// `(j, j+1)`: the coalescing zeros in order of modulus. `None` when
    /// other zeros share the modulus of `x*`, which happens e.g. on the real
    /// axis where `θ_k` is self-inversive in `q^{(k+1)/2} x`.
    pub pair: Option<(usize, usize)>,
    pub source: ZeroSource,
    /// `max(|f|, |∂f/∂x|)` at `(q*, x*)`.
    pub residual: f64,
    pub fxx_abs: f64,
    /// The `j − 1` zeros of smaller modulus.
    pub simple_zeros_inside: Vec<Complex64>,
    /// Close to a value whose existence is only conjectured.
    pub would_be: bool,
}

impl SpectralValue {
    pub fn conj(&self) -> Self {
        Self {
            q_star: self.q_star.conj(),
            x_star: self.x_star.conj(),
            simple_zeros_inside: self.simple_zeros_inside.iter().map(|z| z.conj()).collect(),
            ..self.clone()
        }
    }
}

/// A spectral value of `θ` quoted in the literature. `q` is the printed
/// value; `digits` the number of printed decimals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnownValue {
    pub name: &'static str,
    pub q: (f64, f64),
    pub digits: u32,
    /// `None` where no pair has been reported.
    pub pair: Option<(usize, usize)>,
    pub would_be: bool,
}

/// Known and conjectured spectral values of `θ` (upper half plane only;
/// the set is closed under conjugation).
pub const KNOWN_VALUES: &[KnownValue] = &[
    KnownValue { name: "q~1", q: (0.309249, 0.0), digits: 6, pair: Some((1, 2)), would_be: false },
    KnownValue { name: "q~2", q: (0.516959, 0.0), digits: 6, pair: Some((3, 4)), would_be: false },
    KnownValue { name: "q~3", q: (0.630628, 0.0), digits: 6, pair: Some((5, 6)), would_be: false },
    KnownValue { name: "q-1", q: (-0.72713332, 0.0), digits: 8, pair: None, would_be: false },
    KnownValue { name: "v+", q: (0.4353184958, 0.1230440086), digits: 10, pair: Some((2, 3)), would_be: false },
    KnownValue { name: "w1+", q: (0.5373, 0.1803), digits: 2, pair: Some((3, 4)), would_be: true },
    KnownValue { name: "w2+", q: (0.584, 0.062), digits: 3, pair: Some((4, 5)), would_be: true },
    KnownValue { name: "w3+", q: (0.618, 0.204), digits: 2, pair: Some((4, 5)), would_be: true },
];

/// Distance within which a refined value is identified with a conjectured one.
pub const WOULD_BE_RADIUS: f64 = 0.01;

/// Whether `q` lies near one of the conjectured values or their conjugates.
pub fn is_would_be(q: Complex64) -> bool {
    KNOWN_VALUES.iter().filter(|k| k.would_be).any(|k| {
        let w = Complex64::new(k.q.0, k.q.1);
        (q - w).norm() < WOULD_BE_RADIUS || (q - w.conj()).norm() < WOULD_BE_RADIUS
    })
}

/// One line of a spectral catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    /// `theta_<k>` for a truncation, `theta` for the full series.
    pub source: String,
    pub q: [f64; 2],
    pub x: [f64; 2],
    pub pair: Option<[usize; 2]>,
    pub residual: f64,
    pub would_be: bool,
}

impl From<&SpectralValue> for CatalogEntry {
    fn from(v: &SpectralValue) -> Self {
        Self {
            source: match v.source {
                ZeroSource::Truncation(k) => format!("theta_{k}"),
                ZeroSource::Full { .. } => "theta".into(),
            },
            q: [v.q_star.re, v.q_star.im],
            x: [v.x_star.re, v.x_star.im],
            pair: v.pair.map(|(a, b)| [a, b]),
            residual: v.residual,
            would_be: v.would_be,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub schema: u32,
    pub k: usize,
    pub region: RegionSpec,
    pub seed: u64,
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn new(k: usize, region: RegionSpec, seed: u64, values: &[SpectralValue]) -> Self {
        Self {
            schema: crate::verify::SCHEMA_VERSION,
            k,
            region,
            seed,
            entries: values.iter().map(CatalogEntry::from).collect(),
        }
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| Complex64::new(e.q[0], e.q[1])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn would_be_flags() {
        assert!(is_would_be(Complex64::new(0.5374, 0.18)));
        assert!(is_would_be(Complex64::new(0.5374, -0.18)));
        assert!(is_would_be(Complex64::new(0.617, -0.204)));
        assert!(!is_would_be(Complex64::new(0.309249, 0.0)));
        assert!(!is_would_be(Complex64::new(0.4353184958, 0.1230440086)));
    }
}
