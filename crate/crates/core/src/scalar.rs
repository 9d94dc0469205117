//! Floating-point scalar abstraction.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};
use std::fmt::{Debug, Display, LowerExp};

/// Scalar type the numerics are generic over; implemented for `f32` and `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssignOps
    + rustfft::FftNum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    fn from_literal(x: f64) -> Self;
}

impl Real for f32 {
    fn from_literal(x: f64) -> Self {
        x as f32
    }
}

impl Real for f64 {
    fn from_literal(x: f64) -> Self {
        x
    }
}

/// Shorthand for numeric literals in generic code.
pub(crate) fn r<T: Real>(x: f64) -> T {
    T::from_literal(x)
}
