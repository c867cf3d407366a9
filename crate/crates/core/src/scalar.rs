//! Scalar abstraction: the library is generic over the floating-point type.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the solver operates on (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Lifts an `f64` literal into the scalar type.
pub(crate) fn lit<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("literal must be representable in the scalar type")
}

/// Converts a scalar to `f64` for diagnostics and reports.
pub(crate) fn as_f64<S: Scalar>(x: S) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
