//! Lower bound for `|θ|` on `|x| = |q|^{-3/2}`, `arg q ∈ [π/4, π/2]`,
//! `|q| ≤ 0.6`, assembled from torus minima of `|θ_3|` and the comparison
//! functions `Ξ` and `Ψ`.
//!
//! Every constant is recomputed and then rounded outward to a fixed number
//! of decimals (lower bounds down, upper bounds up). Margins are formed in
//! exact integer units of `1e-5` from those rounded values, so the printed
//! decimals are reproducible and carry no float noise.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use super::{VerifyError, SCHEMA_VERSION};
use crate::bounds::{psi, xi};
use crate::torusopt::{minimize_on_torus, TorusMinResult, TorusProblem, DEFAULT_RESTARTS, DEFAULT_TOL};

const UNIT_DIGITS: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lower,
    Upper,
}

/// A recomputed constant together with the rounded bound that enters the
/// margins and the decimal printed for it in the literature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConstant {
    pub name: String,
    pub value: f64,
    pub kind: BoundKind,
    pub digits: u32,
    /// `value` rounded outward to `digits` decimals.
    pub bound: f64,
    pub printed: f64,
    /// Whether the printed decimal is itself a valid bound for `value`.
    pub printed_bound_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainMargin {
    pub step: String,
    pub value: f64,
    pub printed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub schema: u32,
    pub seed: u64,
    pub minima: Vec<TorusMinResult<f64>>,
    pub constants: Vec<ChainConstant>,
    pub margins: Vec<ChainMargin>,
    pub overall_margin: f64,
    pub overall_pass: bool,
}

impl ChainReport {
    pub fn constant(&self, name: &str) -> Option<&ChainConstant> {
        self.constants.iter().find(|c| c.name == name)
    }

    pub fn margin(&self, step: &str) -> Option<&ChainMargin> {
        self.margins.iter().find(|m| m.step == step)
    }
}

/// Value rounded outward to `digits` decimals, in units of `1e-5`.
fn round_units(value: f64, digits: u32, kind: BoundKind) -> i64 {
    let scale = 10f64.powi(digits as i32);
    let v = value * scale;
    let r = match kind {
        BoundKind::Lower => v.floor(),
        BoundKind::Upper => v.ceil(),
    };
    r as i64 * 10i64.pow(UNIT_DIGITS - digits)
}

fn from_units(u: i64) -> f64 {
    u as f64 / 10f64.powi(UNIT_DIGITS as i32)
}

#[derive(Default)]
struct Builder {
    constants: Vec<ChainConstant>,
    margins: Vec<ChainMargin>,
}

impl Builder {
    fn constant(&mut self, name: &str, value: f64, kind: BoundKind, digits: u32, printed: f64) -> i64 {
        let units = round_units(value, digits, kind);
        let printed_bound_holds = match kind {
            BoundKind::Lower => value >= printed,
            BoundKind::Upper => value <= printed,
        };
        self.constants.push(ChainConstant {
            name: name.into(),
            value,
            kind,
            digits,
            bound: from_units(units),
            printed,
            printed_bound_holds,
        });
        units
    }

    fn margin(&mut self, step: &str, units: i64, printed: f64) -> Result<i64, VerifyError> {
        let value = from_units(units);
        self.margins.push(ChainMargin {
            step: step.into(),
            value,
            printed,
        });
        if units <= 0 {
            return Err(VerifyError::ChainBroken {
                step: step.into(),
                margin: value,
            });
        }
        Ok(units)
    }
}

/// Minimum of `|1 − r e^{ib}|` over `b ∈ [lo, hi]` by golden-section search
/// (the function is unimodal in `b` on `[0, π]`).
fn min_abs_one_minus_q(r: f64, lo: f64, hi: f64) -> f64 {
    let f = |b: f64| (1.0 - 2.0 * r * b.cos() + r * r).sqrt();
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut c) = (lo, hi);
    for _ in 0..200 {
        let x1 = c - g * (c - a);
        let x2 = a + g * (c - a);
        if f(x1) <= f(x2) {
            c = x2;
        } else {
            a = x1;
        }
    }
    f(lo).min(f(hi)).min(f(0.5 * (a + c)))
}

fn torus_min_k3(r: f64, seed: u64) -> Result<TorusMinResult<f64>, VerifyError> {
    let p = TorusProblem::new(3, r, 1.5, (FRAC_PI_4, FRAC_PI_2))?;
    Ok(minimize_on_torus(&p, seed, DEFAULT_RESTARTS, DEFAULT_TOL)?)
}

/// Runs the whole chain. Fails with [`VerifyError::ChainBroken`] at the
/// first non-positive margin.
pub fn run_k1_chain(seed: u64) -> Result<ChainReport, VerifyError> {
    use BoundKind::{Lower, Upper};
    let mut b = Builder::default();
    let dpsi = |s: f64, t: f64| psi(s) - psi(t);

    // |q| = 0.5
    let min05 = torus_min_k3(0.5, seed)?;
    let mu05 = b.constant("min|theta_3| at r=0.5", min05.mu, Lower, 2, 0.45);
    let psi05 = b.constant("Psi(0.5)", psi(0.5), Upper, 4, 0.0683);
    let m3 = b.margin("r=0.5", mu05 - psi05, 0.3817)?;

    // 0.5 ≤ |q| ≤ 0.6 and 0.4 ≤ |q| ≤ 0.5, compared with |q| = 0.5.
    let xi4 = b.constant("Xi(0.6,0.5)", xi(0.6, 0.5), Upper, 4, 0.2345);
    let dpsi4 = b.constant("Psi(0.6)-Psi(0.5)", dpsi(0.6, 0.5), Upper, 4, 0.0854);
    b.margin("r in [0.5,0.6]", m3 - xi4 - dpsi4, 0.0618)?;
    let xi5 = b.constant("Xi(0.5,0.4)", xi(0.5, 0.4), Upper, 4, 0.2675);
    let dpsi5 = b.constant("Psi(0.5)-Psi(0.4)", dpsi(0.5, 0.4), Upper, 4, 0.0417);
    b.margin("r in [0.4,0.5]", m3 - xi5 - dpsi5, 0.0725)?;

    // |q| = 0.36
    let min036 = torus_min_k3(0.36, seed)?;
    let mu036 = b.constant("min|theta_3| at r=0.36", min036.mu, Lower, 2, 0.55);
    let psi036 = b.constant("Psi(0.36)", psi(0.36), Upper, 5, 0.01718);
    let m6 = b.margin("r=0.36", mu036 - psi036, 0.53282)?;

    let xi7a = b.constant("Xi(0.4,0.36)", xi(0.4, 0.36), Upper, 4, 0.1226);
    let dpsi7a = b.constant("Psi(0.4)-Psi(0.36)", dpsi(0.4, 0.36), Upper, 5, 0.00939);
    b.margin("r in [0.36,0.4]", m6 - xi7a - dpsi7a, 0.40083)?;
    let xi7b = b.constant("Xi(0.36,0.24)", xi(0.36, 0.24), Upper, 3, 0.473);
    let dpsi7b = b.constant("Psi(0.36)-Psi(0.24)", dpsi(0.36, 0.24), Upper, 5, 0.01394);
    b.margin("r in [0.24,0.36]", m6 - xi7b - dpsi7b, 0.04588)?;

    // |q| < 0.24: θ_3 = (1 + q²x)(1 + (1 − q)qx + q⁴x²).
    let r = 0.24f64;
    let one_minus_q = b.constant(
        "min|1-q| on |q|=0.24",
        min_abs_one_minus_q(r, FRAC_PI_4, FRAC_PI_2),
        Lower,
        4,
        0.8474,
    );
    let q2x = b.constant("|q^2 x| envelope", r.sqrt(), Upper, 1, 0.5);
    let q4x2 = b.constant("|q^4 x^2| envelope", r, Upper, 2, 0.24);
    let qx = b.constant("|qx| envelope", r.powf(-0.5), Lower, 1, 2.0);
    let psi024 = b.constant("Psi(0.24)", psi(r), Upper, 4, 0.0034);
    let unit = 10i64.pow(UNIT_DIGITS);
    // |1 + q²x| ≥ 1 − |q²x| and |1 + (1−q)qx + q⁴x²| ≥ |qx|·|1−q| − 1 − |q⁴x²|.
    let first = unit - q2x;
    let second = qx * one_minus_q / unit - unit - q4x2;
    let theta3 = first * second / unit;
    b.margin("r < 0.24", theta3 - psi024, 0.224)?;

    let overall = b
        .margins
        .iter()
        .map(|m| m.value)
        .fold(f64::INFINITY, f64::min);
    Ok(ChainReport {
        schema: SCHEMA_VERSION,
        seed,
        minima: vec![min05, min036],
        constants: b.constants,
        margins: b.margins,
        overall_margin: overall,
        overall_pass: overall > 0.0,
    })
}
