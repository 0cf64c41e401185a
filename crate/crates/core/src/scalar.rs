//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
///
/// All tolerances in the library are written for `f64`; with `f32` the
/// routines still run but most default tolerances sit below machine epsilon
/// and are clamped to it (see [`Real::tol`]).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Never fails for finite input.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    /// Converts a count or index.
    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits the scalar range")
    }

    /// `max(x, 16 eps)`: a requested tolerance that the type can honour.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(16.0))
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn is_finite<T: Real>(z: Cx<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `r^(num/2)` for a positive real radius; half-integer powers are only
/// ever applied to moduli, so no branch cut is involved.
#[inline]
pub fn half_pow<T: Real>(r: T, num: i64) -> T {
    (T::lit(num as f64 / 2.0) * r.ln()).exp()
}

/// Triangular number `j(j+1)/2`, the q-exponent of the j-th term.
#[inline]
pub const fn tri(j: u64) -> u64 {
    j * (j + 1) / 2
}
