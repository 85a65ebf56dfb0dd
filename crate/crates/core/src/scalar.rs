//! Floating-point scalar abstraction: f32 or f64.

use ndarray::ScalarOperand;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::fmt::{Debug, Display};

/// Scalar type all numeric kernels are generic over.
///
/// Probability-level tolerances in this crate are stated for binary64; the
/// `f32` instantiation is provided for cheap Monte Carlo work, not for
/// certification at the default tolerances.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + ScalarOperand
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Complementary error function.
    fn erfc(self) -> Self;

    /// One standard normal draw.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f64 {
    fn erfc(self) -> Self {
        crate::special::erfc(self)
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Scalar for f32 {
    fn erfc(self) -> Self {
        crate::special::erfc(self as f64) as f32
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

/// Convert an f64 constant into the working scalar type.
#[inline]
pub(crate) fn cst<F: Scalar>(x: f64) -> F {
    F::from_f64(x).expect("constant representable in the scalar type")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_round_trip() {
        assert_eq!(cst::<f64>(0.25), 0.25);
        assert_eq!(cst::<f32>(0.25), 0.25f32);
    }
}
