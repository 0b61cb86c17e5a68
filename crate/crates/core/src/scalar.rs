//! Floating point scalar abstraction shared by the simulation kernels.

use std::fmt::Debug;
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar used for amplitudes: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Default
    + Send
    + Sync
    + 'static
{
    /// Tolerance used for normalization checks at this precision.
    fn norm_tolerance() -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Scalar for f32 {
    fn norm_tolerance() -> Self {
        1e-5
    }
}

impl Scalar for f64 {
    fn norm_tolerance() -> Self {
        1e-10
    }
}

pub type Amplitude<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Scalar>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn i_unit<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}
