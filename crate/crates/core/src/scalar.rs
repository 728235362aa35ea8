//! Numeric abstractions shared by the exact and floating-point code paths.

use std::fmt::Debug;
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// A field element usable in weight matrices, residuals and elimination.
///
/// Floating-point types treat tiny magnitudes as zero during pivoting;
/// rationals only treat exact zero as zero.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// True when arithmetic is exact.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Exact conversion of a finite float (every finite `f64` is a dyadic
    /// rational). `None` for NaN or infinities.
    fn from_f64(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Zero test relative to `scale` (the largest magnitude in play).
    fn is_negligible(&self, scale: &Self) -> bool;
}

macro_rules! float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_ratio(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }

            fn from_f64(x: f64) -> Option<Self> {
                x.is_finite().then_some(x as $t)
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn is_negligible(&self, scale: &Self) -> bool {
                self.abs() <= $tol * scale.abs().max(1.0)
            }
        }
    };
}

float_scalar!(f64, 1e-12);
float_scalar!(f32, 1e-5);

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Ratios whose parts overflow f64 on their own.
            let num = self.numer().to_f64().unwrap_or(f64::NAN);
            let den = self.denom().to_f64().unwrap_or(f64::NAN);
            num / den
        })
    }

    fn is_negligible(&self, _scale: &Self) -> bool {
        self.is_zero()
    }
}

/// Real floating-point type for kernel computations.
pub trait Real: Float + FromPrimitive + Sum + Debug + Send + Sync + 'static {}

impl Real for f32 {}
impl Real for f64 {}

/// Largest absolute value in a slice, zero when empty.
pub fn max_abs<S: Scalar>(values: &[S]) -> S {
    values.iter().fold(S::zero(), |acc, x| {
        let a = x.abs();
        if a > acc {
            a
        } else {
            acc
        }
    })
}
