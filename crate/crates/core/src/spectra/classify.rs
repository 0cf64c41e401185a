use num_complex::Complex64;

use super::SpectraError;
use crate::series::EvalConfig;
use crate::zeros::{roots_truncation, zeros_of_theta, ZeroSource};

/// Relative width of the modulus band around `|x*|`.
pub const CLASSIFY_TOL_REL: f64 = 1e-6;

/// Zeros of `f(q,·)` with modulus below `2|x*|` (all zeros for a truncation).
fn zeros_for(source: ZeroSource, q: Complex64, x: Complex64) -> Result<Vec<Complex64>, SpectraError> {
    Ok(match source {
        ZeroSource::Truncation(k) => roots_truncation(q, k)?.zeros,
        ZeroSource::Full { tail_tol } => {
            let cfg = EvalConfig {
                tail_tol,
                ..EvalConfig::default()
            };
            zeros_of_theta(q, 2.0 * x.norm(), &cfg)?
        }
    })
}

/// Pair `(j, j+1)` of a double zero `x*` of `f(q*,·)`: `j − 1` zeros have
/// modulus below `|x*|(1 − tol)`.
///
/// The two zeros nearest `x*` are the coalescing pair. Any other zero with
/// modulus in the band `|x*|(1 ± tol)` makes the order undefined.
pub fn classify_pair(source: ZeroSource, q: Complex64, x: Complex64) -> Result<(usize, usize), SpectraError> {
    classify_with_inside(source, q, x).map(|(p, _)| p)
}

/// Pair (if defined) and the zeros inside it.
pub(crate) type Classification = (Option<(usize, usize)>, Vec<Complex64>);

/// Like [`classify_with_inside`], but an ambiguous modulus yields `None`.
pub(crate) fn classify_lenient(source: ZeroSource, q: Complex64, x: Complex64) -> Result<Classification, SpectraError> {
    match classify_with_inside(source, q, x) {
        Ok((p, inside)) => Ok((Some(p), inside)),
        Err(SpectraError::AmbiguousModulus { .. }) => Ok((None, Vec::new())),
        Err(e) => Err(e),
    }
}

pub(crate) fn classify_with_inside(
    source: ZeroSource,
    q: Complex64,
    x: Complex64,
) -> Result<((usize, usize), Vec<Complex64>), SpectraError> {
    let mut zeros = zeros_for(source, q, x)?;
    if zeros.len() < 2 {
        return Err(SpectraError::InvalidParameter("fewer than two zeros located".into()));
    }
    zeros.sort_by(|a, b| (a - x).norm().total_cmp(&(b - x).norm()));
    let others = &zeros[2..];
    let m = x.norm();
    let band = CLASSIFY_TOL_REL * m;
    if others.iter().any(|z| (z.norm() - m).abs() <= band) {
        return Err(SpectraError::AmbiguousModulus { modulus: m });
    }
    let mut inside: Vec<Complex64> = others.iter().copied().filter(|z| z.norm() < m - band).collect();
    crate::zeros::sort_by_modulus(&mut inside);
    let j = inside.len() + 1;
    Ok(((j, j + 1), inside))
}
