//! Numerics for Ramanujan's partial theta function
//! `θ(q,x) = Σ_{j≥0} q^{j(j+1)/2} x^j`.
//!
//! * [`series`]: evaluation of `θ`, its truncations, `Θ*` and `G` with tail bounds.
//! * [`bounds`]: the comparison functions `Ξ, Ψ, K, L, M` and the radius `c₀`.
//! * [`zeros`]: zeros of `θ(q,·)` and `θ_k(q,·)`, zero counting, continuation,
//!   and double-zero refinement.
//! * [`torusopt`]: global minima of `|θ_k|` on tori `|q| = r`, `|x| = r^{-e}`.
//! * [`verify`]: the separation certificates built from those minima.
//! * [`spectra`]: spectral values (parameters with a multiple zero) of `θ_k`
//!   and `θ`, their classification and plotting.
//!
//! `series`, `bounds`, `zeros` and `torusopt` are generic over the [`Real`]
//! scalar (`f32` or `f64`); the aliases below fix it to `f64`, which is what
//! all tolerances target. `verify` and `spectra` work in `f64`.

// `!(a > b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod scalar;
pub mod series;
pub mod spectra;
pub mod torusopt;
pub mod verify;
pub mod zeros;

pub use num_complex::Complex;
pub use scalar::{Cx, Real};

pub type Complex64 = Complex<f64>;
pub type EvalConfig64 = series::EvalConfig<f64>;
pub type TailedEvaluation64 = series::TailedEvaluation<f64>;
pub type ZeroSet64 = zeros::ZeroSet<f64>;
pub type ContourConfig64 = zeros::ContourConfig<f64>;
pub type DoubleZero64 = zeros::DoubleZero<f64>;
pub type TorusProblem64 = torusopt::TorusProblem<f64>;
pub type TorusMinResult64 = torusopt::TorusMinResult<f64>;
