use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, Signed};

/// Number type the Equal Shares computations run over.
///
/// Exact rationals give platform-independent outcomes; `f64` is accepted for
/// quick approximate runs but carries no such guarantee.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Display + Send + Sync {
    fn from_u64(value: u64) -> Self;

    fn to_f64(&self) -> f64;

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn is_negative_value(&self) -> bool {
        *self < Self::zero()
    }
}

impl Scalar for f64 {
    fn from_u64(value: u64) -> Self {
        value as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_u64(value: u64) -> Self {
        value as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    fn from_u64(value: u64) -> Self {
        Ratio::from_integer(BigInt::from(value))
    }

    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negative_value(&self) -> bool {
        self.is_negative()
    }
}

macro_rules! impl_small_ratio {
    ($($int:ty),*) => {$(
        impl Scalar for Ratio<$int> {
            fn from_u64(value: u64) -> Self {
                Ratio::from_integer(<$int>::try_from(value).expect("value exceeds ratio range"))
            }

            fn to_f64(&self) -> f64 {
                *self.numer() as f64 / *self.denom() as f64
            }
        }
    )*};
}

impl_small_ratio!(i64, i128);
