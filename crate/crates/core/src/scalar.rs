use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the solver is generic over.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal, panicking only if the target cannot represent it at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    fn from_index(k: usize) -> Self {
        Self::from_usize(k).expect("index not representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Scale for tolerances that must shrink with the precision of the type.
    fn tol(scale: f64) -> Self {
        Self::lit(scale) * Self::epsilon() / Self::lit(f64::EPSILON)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `binom(k, 2)` as a scalar.
pub(crate) fn pairs<T: Real>(k: usize) -> T {
    T::from_index(k * k.saturating_sub(1) / 2)
}
