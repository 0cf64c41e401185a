use super::classify::classify_lenient;
use super::{is_would_be, SpectraError, SpectralValue};
use crate::zeros::{refine_double_zero, DoubleZeroConfig};

pub const DEFAULT_K_SCHEDULE: &[usize] = &[12, 16, 20, 24];
pub const DEFAULT_STABILITY_TOL: f64 = 1e-7;

/// Carries a spectral value of a truncation over to `θ`: Newton on
/// `θ_k` for each `k` of the schedule, then on the full series. Succeeds
/// when the last two stages agree in `q` to `stability_tol`.
pub fn refine_to_full_theta(
    sv: &SpectralValue,
    k_schedule: &[usize],
    stability_tol: f64,
) -> Result<SpectralValue, SpectraError> {
    let cfg = DoubleZeroConfig::default();
    let (mut q, mut x) = (sv.q_star, sv.x_star);
    let mut previous = None;
    for &k in k_schedule {
        let dz = refine_double_zero(q, x, Some(k), &cfg)?;
        previous = Some(dz.q);
        q = dz.q;
        x = dz.x;
    }
    let dz = refine_double_zero(q, x, None, &cfg)?;
    let change = previous.map_or(0.0, |p| (dz.q - p).norm());
    if previous.is_some() && !(change < stability_tol) {
        return Err(SpectraError::NotStabilized { last_change: change });
    }
    let (pair, inside) = classify_lenient(dz.source, dz.q, dz.x)?;
    Ok(SpectralValue {
        q_star: dz.q,
        x_star: dz.x,
        pair,
        source: dz.source,
        residual: dz.residual,
        fxx_abs: dz.fxx_abs,
        simple_zeros_inside: inside,
        would_be: is_would_be(dz.q),
    })
}
