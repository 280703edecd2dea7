//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar the algorithms are generic over.
///
/// Implemented for `f32` and `f64`. The solver needs square roots, SVD and
/// symmetric eigendecomposition, so exact/rational scalars are not supported.
pub trait Scalar:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug + FromStr + Send + Sync + 'static
{
    /// Converts an `f64` literal or configuration value into this scalar.
    fn cast(value: f64) -> Self {
        <Self as FromPrimitive>::from_f64(value).expect("finite f64 converts to scalar")
    }

    /// Widens this scalar to `f64` (for reporting and serialization).
    fn as_f64(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).expect("scalar converts to f64")
    }

    /// Machine epsilon of the scalar type, as `f64`.
    fn machine_epsilon() -> f64;

    /// A tolerance of `base` for `f64`, widened for lower-precision types.
    fn tolerance(base: f64) -> f64 {
        base.max(1.0e3 * Self::machine_epsilon())
    }
}

impl Scalar for f64 {
    fn machine_epsilon() -> f64 {
        f64::EPSILON
    }
}

impl Scalar for f32 {
    fn machine_epsilon() -> f64 {
        f32::EPSILON as f64
    }
}
