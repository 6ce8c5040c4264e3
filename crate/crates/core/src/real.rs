//! Scalar abstraction shared by every numerical routine in the crate.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating point scalar the solvers are generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Sum
    + Send
    + Sync
    + Default
    + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Converts a count into `Self`.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance for "converged to machine precision" tests: `max(floor, 64 eps)`.
    #[inline]
    fn tol_floor(floor: f64) -> Self {
        Self::lit(floor).max(Self::epsilon() * Self::lit(64.0))
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + LowerExp
        + Sum
        + Send
        + Sync
        + Default
        + 'static
{
}

/// Shorthand for [`Real::lit`].
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}
