//! Scalar abstraction: every numeric kernel is generic over a `num-traits`
//! float so the whole stack instantiates at `f32` or `f64`.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the library is generic over.
///
/// The pinned tolerances in this crate assume `f64`; an `f32` instantiation
/// is still numerically meaningful because validation thresholds are floored
/// at a multiple of the machine epsilon (see [`Real::validation_eps`]).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum<Self>
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` literal. Panics only on genuinely unrepresentable
    /// inputs, which for literal tolerances and small integers cannot happen.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Convert a count.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Tolerance used by structural validations (symmetry, symplecticity,
    /// hermiticity): the given `f64` literal, floored at `1e3 * epsilon` so
    /// lower-precision scalars validate against their own noise level.
    #[inline]
    fn validation_eps(literal: f64) -> Self {
        let floor = Self::epsilon() * Self::of(1e3);
        Self::of(literal).max(floor)
    }
}

impl Real for f32 {}
impl Real for f64 {}
