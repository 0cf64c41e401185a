use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GridSpec, VerifyError, SCHEMA_VERSION};
use crate::bounds::{k_bound, l_bound, m_bound};
use crate::torusopt::{minimize_on_torus, TorusMinResult, TorusProblem, DEFAULT_RESTARTS, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    K1Chain,
    /// `|x| = |q|^{-5/2}`, `arg q ∈ [π/4, π/2]`; rows pass on `η > 0`.
    K2Grid,
    /// `|x| = |q|^{-5/2}`, `arg q ∈ [π/2, π]`; rows pass on `ρ > 0`.
    Sector2,
    Direct,
}

/// One consecutive pair of radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub nu: usize,
    pub r_lo: f64,
    pub r_hi: f64,
    pub mu_lo: f64,
    pub mu_hi: f64,
    /// `K(r_hi, r_lo)`.
    #[serde(rename = "K")]
    pub k_term: f64,
    /// `|L(r_lo) − L(r_hi)|`.
    #[serde(rename = "dL")]
    pub l_diff: f64,
    /// `M(r_hi)`.
    #[serde(rename = "M")]
    pub m_term: f64,
    pub rho: f64,
    pub eta: f64,
    pub pass: bool,
}

impl CertificateRow {
    fn new(nu: usize, r: (f64, f64), mu: (f64, f64), pipeline: Pipeline) -> Self {
        let (r_lo, r_hi) = r;
        let k_term = k_bound(r_hi, r_lo);
        let l_diff = (l_bound(r_lo) - l_bound(r_hi)).abs();
        let m_term = m_bound(r_hi);
        let rho = mu.0.min(mu.1) - k_term - l_diff;
        let eta = rho - 2.0 * m_term;
        let pass = match pipeline {
            Pipeline::K2Grid => eta > 0.0,
            _ => rho > 0.0,
        };
        Self {
            nu,
            r_lo,
            r_hi,
            mu_lo: mu.0,
            mu_hi: mu.1,
            k_term,
            l_diff,
            m_term,
            rho,
            eta,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub schema: u32,
    pub pipeline: Pipeline,
    pub grid: GridSpec,
    pub b_range: [f64; 2],
    pub seed: u64,
    /// Torus minima `μ_ν` for every radius, in grid order.
    pub minima: Vec<TorusMinResult<f64>>,
    pub rows: Vec<CertificateRow>,
    pub mu_min: f64,
    pub mu_max: f64,
    pub min_rho: f64,
    pub min_eta: f64,
    pub overall_pass: bool,
}

impl SeparationCertificate {
    pub fn failing_rows(&self) -> impl Iterator<Item = &CertificateRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// Torus minima of `|θ_5|` on `|x| = r^{-5/2}` for every radius of `grid`,
/// followed by the row bounds. All radii use the same `seed`.
pub fn run_grid(
    pipeline: Pipeline,
    grid: &GridSpec,
    b_range: (f64, f64),
    seed: u64,
) -> Result<SeparationCertificate, VerifyError> {
    grid.validate()?;
    let radii = grid.radii();
    let minima = radii
        .par_iter()
        .map(|&r| {
            let p = TorusProblem::new(5, r, 2.5, b_range)?;
            minimize_on_torus(&p, seed, DEFAULT_RESTARTS, DEFAULT_TOL)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<CertificateRow> = (0..radii.len() - 1)
        .map(|nu| {
            CertificateRow::new(
                nu,
                (radii[nu], radii[nu + 1]),
                (minima[nu].mu, minima[nu + 1].mu),
                pipeline,
            )
        })
        .collect();
    let mu_min = minima.iter().map(|m| m.mu).fold(f64::INFINITY, f64::min);
    let mu_max = minima.iter().map(|m| m.mu).fold(f64::NEG_INFINITY, f64::max);
    let min_rho = rows.iter().map(|r| r.rho).fold(f64::INFINITY, f64::min);
    let min_eta = rows.iter().map(|r| r.eta).fold(f64::INFINITY, f64::min);
    Ok(SeparationCertificate {
        schema: SCHEMA_VERSION,
        pipeline,
        grid: *grid,
        b_range: [b_range.0, b_range.1],
        seed,
        overall_pass: rows.iter().all(|r| r.pass),
        minima,
        rows,
        mu_min,
        mu_max,
        min_rho,
        min_eta,
    })
}

/// `θ_5` grid over `arg q ∈ b_range`; each row requires `η_ν > 0`.
pub fn run_k2_grid(grid: &GridSpec, b_range: (f64, f64), seed: u64) -> Result<SeparationCertificate, VerifyError> {
    run_grid(Pipeline::K2Grid, grid, b_range, seed)
}

/// Radii `0.55 + 0.005 j`, `j = 0..=10`, over `arg q ∈ [π/2, π]`; each row
/// requires `ρ > 0`.
pub fn run_sector2(seed: u64) -> Result<SeparationCertificate, VerifyError> {
    let grid = GridSpec {
        r_start: 0.55,
        step: 0.005,
        count: 11,
    };
    run_grid(Pipeline::Sector2, &grid, (FRAC_PI_2, PI), seed)
}

/// `arg q` range of the first sector.
pub const SECTOR1_B_RANGE: (f64, f64) = (FRAC_PI_4, FRAC_PI_2);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_row_at_the_top() {
        let grid = GridSpec {
            r_start: 0.5975,
            step: 0.0025,
            count: 2,
        };
        let c = run_k2_grid(&grid, SECTOR1_B_RANGE, 3).unwrap();
        assert_eq!(c.rows.len(), 1);
        let row = c.rows[0];
        assert_eq!(row.r_hi, 0.6);
        assert!(row.eta > 0.0 && row.pass && c.overall_pass);
        let direct = row.mu_lo.min(row.mu_hi) - k_bound(0.6, 0.5975) - (l_bound(0.5975f64) - l_bound(0.6)).abs()
            - 2.0 * m_bound(0.6);
        assert!((row.eta - direct).abs() < 1e-15);
    }

    #[test]
    fn json_uses_short_field_names() {
        let grid = GridSpec {
            r_start: 0.3,
            step: 0.01,
            count: 2,
        };
        let c = run_k2_grid(&grid, SECTOR1_B_RANGE, 0).unwrap();
        let s = super::super::to_canonical_json(&c).unwrap();
        for key in ["\"K\"", "\"dL\"", "\"M\"", "\"k2-grid\"", "\"schema\": 1"] {
            assert!(s.contains(key), "{key} missing");
        }
    }
}
