use num_complex::Complex64;

use super::VerifyError;
use crate::zeros::{count_zeros_disk, separating_radius, zeros_of_theta, ContourConfig, ZeroSet, ZeroSource};

/// Strong separation of the first `kmax` zeros of `θ(q,·)`, decided by the
/// argument principle: the disk `|x| < |q|^{-(2k+1)/2}` must contain exactly
/// `k` zeros for `k = 1..=kmax`.
///
/// The returned set lists the zeros inside the last circle; its `separated`
/// flag is the count-based verdict.
pub fn certify_separation_direct(
    q: Complex64,
    kmax: usize,
    cfg: &ContourConfig<f64>,
) -> Result<ZeroSet<f64>, VerifyError> {
    if kmax == 0 {
        return Err(VerifyError::InvalidGrid("kmax must be at least 1".into()));
    }
    let q_abs = q.norm();
    let mut separated = true;
    let mut warnings = Vec::new();
    for k in 1..=kmax {
        let n = count_zeros_disk(q, separating_radius(q_abs, k), cfg)?;
        if n != k {
            separated = false;
            warnings.push(format!("{n} zeros inside |x| = |q|^-{}/2, expected {k}", 2 * k + 1));
        }
    }
    let outer = separating_radius(q_abs, kmax);
    let zeros = zeros_of_theta(q, outer, &cfg.eval)?;
    let mut set = ZeroSet::new(
        q,
        zeros,
        ZeroSource::Full {
            tail_tol: cfg.eval.tail_tol,
        },
        Some(kmax),
    );
    set.separated = separated;
    set.warnings.extend(warnings);
    Ok(set)
}
