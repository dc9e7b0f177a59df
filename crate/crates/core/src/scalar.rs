//! Scalar abstraction shared by every kernel.
//!
//! The field algebra only needs a signed ordered field, so the grid, operator
//! and Yee modules are generic over [`Scalar`]. That admits `f32`/`f64` as well
//! as exact rationals, which lets equivalence results be checked with zero
//! rounding. Anything that needs `sqrt`, `sin` or an iterative tolerance is
//! bounded on [`Real`] instead.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the literal is not finite.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("scalar literal must be finite")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits in scalar")
    }

    fn is_finite_value(&self) -> bool;

    /// Lossy view used for reports and tolerance checks.
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Floating-point scalars.
pub trait Real: Scalar + Float + FloatConst {}

impl Scalar for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Real for f64 {}
impl Real for f32 {}

impl Scalar for BigRational {
    fn lit(v: f64) -> Self {
        BigRational::from_float(v).expect("scalar literal must be finite")
    }

    fn from_count(n: usize) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn is_finite_value(&self) -> bool {
        true
    }
}

/// Absolute value without the `Float`/`Signed` method ambiguity.
pub(crate) fn abs<T: Scalar>(x: &T) -> T {
    Signed::abs(x)
}

pub(crate) fn max<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

pub(crate) fn half<T: Scalar>() -> T {
    T::one() / (T::one() + T::one())
}

pub(crate) fn two<T: Scalar>() -> T {
    T::one() + T::one()
}
