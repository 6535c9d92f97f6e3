use nalgebra as na;
use num_traits as nt;

/// Scalar type the numerical routines are generic over: `f32` or `f64`.
///
/// `RealField` brings the elementary functions and the linear-algebra
/// machinery; the two `num-traits` bounds cover conversion of literal
/// constants in and extraction of probabilities out (the chi-square CDF
/// is evaluated in `f64` regardless of the working precision).
pub trait Float: Copy + nt::FromPrimitive + nt::ToPrimitive + na::RealField {}

impl Float for f32 {}
impl Float for f64 {}

/// Shorthand for `T::from_f64(v).unwrap()`, for constants known to fit.
#[inline]
pub(crate) fn fl<T: Float>(v: f64) -> T {
    T::from_f64(v).expect("constant representable in scalar type")
}
