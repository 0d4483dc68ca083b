//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point type the linear algebra is generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into this type.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite real converts to f64")
    }

    /// An absolute tolerance of at least `base`, widened for low-precision types
    /// so that a contract stated for `f64` stays meaningful for `f32`.
    fn tolerance(base: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(base).max(floor)
    }
}

impl Real for f32 {}
impl Real for f64 {}
