use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classify::classify_lenient;
use super::resultant::{resultant_raw, RawResultant};
use super::{is_would_be, SpectraError, SpectralValue};
use crate::torusopt::SplitMix64;
use crate::zeros::{closest_pair, refine_double_zero, roots_truncation, DoubleZeroConfig};

/// Largest `|Re q|`, `|Im q|` a region may reach.
pub const REGION_LIMIT: f64 = 1.2;
const DEDUP_DIST: f64 = 1e-8;
const FLOOR_FACTOR: f64 = 1e-6;
const MAX_RESIDUAL: f64 = 1e-10;
const MIN_FXX: f64 = 1e-6;
const MIRROR_REL_GAP: f64 = 1e-9;
/// Refinements that drift to `|q|` below this are the origin artifact.
const ORIGIN_CUTOFF: f64 = 1e-6;

/// Rectangle `re_range × im_range` sampled on a `grid_n × grid_n` lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub grid_n: usize,
}

impl RegionSpec {
    pub fn new(re_range: (f64, f64), im_range: (f64, f64), grid_n: usize) -> Result<Self, SpectraError> {
        let r = Self {
            re_range,
            im_range,
            grid_n,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), SpectraError> {
        for (name, (lo, hi)) in [("real", self.re_range), ("imaginary", self.im_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(SpectraError::InvalidParameter(format!(
                    "{name} range [{lo}, {hi}] is empty"
                )));
            }
            if lo < -REGION_LIMIT - 1e-12 || hi > REGION_LIMIT + 1e-12 {
                return Err(SpectraError::InvalidParameter(format!(
                    "{name} range [{lo}, {hi}] leaves [-{REGION_LIMIT}, {REGION_LIMIT}]"
                )));
            }
        }
        if !(3..=4096).contains(&self.grid_n) {
            return Err(SpectraError::InvalidParameter(format!(
                "grid_n = {} not in 3..=4096",
                self.grid_n
            )));
        }
        Ok(())
    }

    pub fn contains(&self, q: Complex64, slack: f64) -> bool {
        q.re >= self.re_range.0 - slack
            && q.re <= self.re_range.1 + slack
            && q.im >= self.im_range.0 - slack
            && q.im <= self.im_range.1 + slack
    }

    fn steps(&self) -> (f64, f64) {
        let n = (self.grid_n - 1) as f64;
        (
            (self.re_range.1 - self.re_range.0) / n,
            (self.im_range.1 - self.im_range.0) / n,
        )
    }
}

fn wrap(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d < -PI {
        d += 2.0 * PI;
    }
    d
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Candidate `q` values: centres of cells around which the resultant winds,
/// and strict local minima of `|Res|` below `1e-6 ×` the median modulus.
fn candidates(grid: &[Vec<(Complex64, RawResultant)>]) -> Vec<Complex64> {
    let n = grid.len();
    let mut out = Vec::new();
    let floor = median(
        grid.iter()
            .flatten()
            .map(|(_, r)| r.ln_abs())
            .filter(|v| v.is_finite())
            .collect(),
    ) + FLOOR_FACTOR.ln();
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let corners = [grid[i][j], grid[i + 1][j], grid[i + 1][j + 1], grid[i][j + 1]];
            if corners.iter().any(|(_, r)| r.is_zero()) {
                continue;
            }
            let w: f64 = (0..4).map(|c| wrap(corners[(c + 1) % 4].1.arg() - corners[c].1.arg())).sum();
            if (w / (2.0 * PI)).round() != 0.0 {
                let centre = corners.iter().map(|(q, _)| *q).sum::<Complex64>() / 4.0;
                out.push(centre);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let v = grid[i][j].1.ln_abs();
            if !v.is_finite() || v >= floor {
                continue;
            }
            let is_min = (i.saturating_sub(1)..=(i + 1).min(n - 1))
                .flat_map(|a| (j.saturating_sub(1)..=(j + 1).min(n - 1)).map(move |b| (a, b)))
                .filter(|&(a, b)| (a, b) != (i, j))
                .all(|(a, b)| grid[a][b].1.ln_abs() > v);
            if is_min {
                out.push(grid[i][j].0);
            }
        }
    }
    out
}

/// Newton refinement from the closest pair of zeros of `θ_k(q0,·)`.
///
/// `θ_k` is palindromic in `q^{(k+1)/2} x`, so double zeros come in pairs
/// `x*`, `q^{-(k+1)}/x*`; the one of smaller modulus is kept.
fn refine_candidate(k: usize, q0: Complex64) -> Option<SpectralValue> {
    let zs = roots_truncation(q0, k).ok()?;
    let (i, j) = closest_pair(&zs.zeros)?;
    let x0 = (zs.zeros[i] + zs.zeros[j]) * 0.5;
    let cfg = DoubleZeroConfig::default();
    let mut dz = refine_double_zero(q0, x0, Some(k), &cfg).ok()?;
    let mirror = dz.q.powu(k as u32 + 1).inv() / dz.x;
    if mirror.norm() < dz.x.norm() * (1.0 - MIRROR_REL_GAP) {
        dz = refine_double_zero(dz.q, mirror, Some(k), &cfg).ok()?;
    }
    if dz.q.norm() < ORIGIN_CUTOFF || dz.residual >= MAX_RESIDUAL || dz.fxx_abs <= MIN_FXX {
        return None;
    }
    let (pair, inside) = classify_lenient(dz.source, dz.q, dz.x).ok()?;
    Some(SpectralValue {
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

/// Spectral values of `θ_k` in `region`.
///
/// The `seed` shifts the sampling lattice by a sub-cell offset, so
/// different seeds give independent grids. Candidates are refined by
/// Newton, deduplicated at distance `1e-8` and completed under
/// conjugation when the conjugate lies in the region. Values whose pair
/// cannot be classified keep `pair = None`.
pub fn scan_truncation_spectrum(
    k: usize,
    region: &RegionSpec,
    seed: u64,
) -> Result<Vec<SpectralValue>, SpectraError> {
    region.validate()?;
    resultant_raw(k, Complex64::new(0.5, 0.0))?;
    let (hr, hi) = region.steps();
    let mut rng = SplitMix64::new(seed);
    let off = Complex64::new((rng.next_f64() - 0.5) * 0.5 * hr, (rng.next_f64() - 0.5) * 0.5 * hi);
    let n = region.grid_n;
    let grid: Vec<Vec<(Complex64, RawResultant)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let q = Complex64::new(region.re_range.0 + hr * i as f64, region.im_range.0 + hi * j as f64) + off;
                    let r = resultant_raw(k, q).unwrap_or_else(|_| RawResultant::zero());
                    (q, r)
                })
                .collect()
        })
        .collect();
    let cands = candidates(&grid);
    let mut found: Vec<SpectralValue> = cands
        .par_iter()
        .filter_map(|&q0| refine_candidate(k, q0))
        .filter(|v| region.contains(v.q_star, 0.0))
        .collect();
    let conj: Vec<SpectralValue> = found
        .iter()
        .filter(|v| v.q_star.im.abs() > DEDUP_DIST && region.contains(v.q_star.conj(), 0.0))
        .map(SpectralValue::conj)
        .collect();
    found.extend(conj);
    found.sort_by(|a, b| a.q_star.re.total_cmp(&b.q_star.re).then(a.q_star.im.total_cmp(&b.q_star.im)));
    let mut out: Vec<SpectralValue> = Vec::with_capacity(found.len());
    for v in found {
        let dup = out
            .iter()
            .rev()
            .take_while(|u| v.q_star.re - u.q_star.re <= DEDUP_DIST)
            .any(|u| (u.q_star - v.q_star).norm() <= DEDUP_DIST);
        if !dup {
            out.push(v);
        }
    }
    Ok(out)
}
