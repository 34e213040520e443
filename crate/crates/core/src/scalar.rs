//! Scalar abstraction for the rate and weight arithmetic.
//!
//! Rankings never need a scalar type: scores are kept as exact integers.
//! Probabilities and demographic rates are ratios of counts, so every
//! quantity here can be computed either in floating point or exactly with
//! big rationals.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync {
    /// Lossy for floats once `n` exceeds the mantissa.
    fn from_count(n: u128) -> Self;

    fn ratio(numerator: u128, denominator: u128) -> Self {
        Self::from_count(numerator) / Self::from_count(denominator)
    }

    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_count(n: u128) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_count(n: u128) -> Self {
        n as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    fn from_count(n: u128) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both are zero.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
