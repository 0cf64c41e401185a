//! Machine-checked versions of the separation argument on the boundary
//! circles `|x| = |q|^{-3/2}` and `|x| = |q|^{-5/2}`: the inequality chain
//! for `θ_3`, the radius-grid certificates for `θ_5`, and a direct check of
//! strong separation for individual `q`.
//!
//! Certificates are plain `f64` data and serialise to canonical JSON
//! (sorted keys, no timestamps) through [`to_canonical_json`].

mod chain;
mod direct;
mod grid;

pub use chain::{run_k1_chain, BoundKind, ChainConstant, ChainMargin, ChainReport};
pub use direct::certify_separation_direct;
pub use grid::{run_grid, run_k2_grid, run_sector2, CertificateRow, Pipeline, SeparationCertificate, SECTOR1_B_RANGE};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::torusopt::TorusError;
use crate::zeros::ZerosError;

/// Version of every JSON document emitted by this module.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("inequality chain broken at {step}: margin {margin}")]
    ChainBroken { step: String, margin: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Zeros(#[from] ZerosError),
}

/// Radii `r_ν = r_start + step·ν`, `ν = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_start: f64,
    pub step: f64,
    pub count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            r_start: 0.2025,
            step: 0.0025,
            count: 160,
        }
    }
}

impl GridSpec {
    /// Radii rounded to 12 decimals, so that e.g. the last default radius is
    /// the double nearest to 0.6 rather than 0.6000000000000001.
    pub fn radii(&self) -> Vec<f64> {
        (0..self.count)
            .map(|nu| ((self.r_start + self.step * nu as f64) * 1e12).round() / 1e12)
            .collect()
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        if self.count < 2 {
            return Err(VerifyError::InvalidGrid(format!("need at least 2 radii, got {}", self.count)));
        }
        if !(self.step > 0.0) {
            return Err(VerifyError::InvalidGrid(format!("step {} must be positive", self.step)));
        }
        let radii = self.radii();
        let (lo, hi) = (radii[0], radii[radii.len() - 1]);
        if !(lo > 0.0 && hi < 1.0) {
            return Err(VerifyError::InvalidGrid(format!("radii [{lo}, {hi}] leave (0, 1)")));
        }
        Ok(())
    }
}

/// Pretty JSON with keys in sorted order. `serde_json::Value` objects are
/// B-tree maps, so a round trip through `Value` sorts every level.
pub fn to_canonical_json<S: Serialize>(value: &S) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}
