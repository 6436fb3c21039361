//! Scalar abstraction: every numerical module in this crate is generic over
//! [`Real`], so the same code runs at `f32` or `f64` precision.

use num_traits::{FromPrimitive, NumCast};

/// Floating-point scalar: `f32` or `f64`.
///
/// Combines nalgebra's `RealField` (linear algebra, trig, SVD) with the
/// num-traits casting machinery used at parsing and I/O boundaries.
pub trait Real: nalgebra::RealField + FromPrimitive + NumCast + Copy + Default {}

impl<T> Real for T where T: nalgebra::RealField + FromPrimitive + NumCast + Copy + Default {}

/// Converts an `f64` constant into any [`Real`] scalar.
#[inline]
pub(crate) fn real<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("f64 value representable in Real scalar")
}

/// Widens any [`Real`] scalar to `f64` (exact for `f32` and `f64`).
#[inline]
pub(crate) fn to_f64<T: Real>(v: T) -> f64 {
    <f64 as NumCast>::from(v).expect("Real scalar widens to f64")
}

/// Tolerance used by debug-build invariant checks, scaled to the precision
/// of the scalar (about 32 ulps of 1.0).
#[inline]
pub(crate) fn unit_tol<T: Real>() -> T {
    T::default_epsilon() * real(32.0)
}
