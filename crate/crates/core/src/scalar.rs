//! Numeric backends for factor tables.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};

/// Entries of factor and joint tables.
///
/// Implemented for `f64`, `f32` and exact `BigRational`.
pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static {
    /// `None` when `x` is not finite (or not representable).
    fn from_f64(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Finite and non-negative.
    fn is_admissible(&self) -> bool;

    /// Products of each row, divided by their sum. `None` when the sum is zero.
    fn normalized_products(rows: &[Vec<Self>]) -> Option<Vec<Self>> {
        let products: Vec<Self> = rows.iter().map(|r| product(r)).collect();
        let total = products.iter().fold(Self::zero(), |acc, p| acc + p.clone());
        if total.is_zero() {
            return None;
        }
        Some(products.into_iter().map(|p| p / total.clone()).collect())
    }
}

pub(crate) fn product<T: Scalar>(values: &[T]) -> T {
    values.iter().fold(T::one(), |acc, v| acc * v.clone())
}

/// Entries this small are multiplied in log space.
pub const LOG_SPACE_THRESHOLD: f64 = 1e-300;

impl Scalar for f64 {
    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_admissible(&self) -> bool {
        self.is_finite() && *self >= 0.0
    }

    fn normalized_products(rows: &[Vec<f64>]) -> Option<Vec<f64>> {
        let tiny = rows
            .iter()
            .flatten()
            .any(|&x| x > 0.0 && x < LOG_SPACE_THRESHOLD);
        if !tiny {
            let products: Vec<f64> = rows.iter().map(|r| r.iter().product()).collect();
            let total: f64 = products.iter().sum();
            if total == 0.0 || !total.is_finite() {
                return None;
            }
            return Some(products.into_iter().map(|p| p / total).collect());
        }
        let logs: Vec<f64> = rows
            .iter()
            .map(|r| r.iter().map(|x| x.ln()).sum())
            .collect();
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return None;
        }
        let shifted: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = shifted.iter().sum();
        Some(shifted.into_iter().map(|p| p / total).collect())
    }
}

impl Scalar for f32 {
    fn from_f64(x: f64) -> Option<Self> {
        let y = x as f32;
        y.is_finite().then_some(y)
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn is_admissible(&self) -> bool {
        self.is_finite() && *self >= 0.0
    }
}

impl Scalar for BigRational {
    /// The decimal that `x` prints as, so `0.1` becomes `1/10`.
    fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        let text = format!("{x:e}");
        let (mantissa, exp) = text.split_once('e')?;
        let exp: i32 = exp.parse().ok()?;
        let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        let digits: BigInt = format!("{int}{frac}").parse().ok()?;
        let shift = exp - frac.len() as i32;
        let ten = BigInt::from(10);
        Some(if shift >= 0 {
            BigRational::from_integer(digits * num_traits::pow(ten, shift as usize))
        } else {
            BigRational::new(digits, num_traits::pow(ten, (-shift) as usize))
        })
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_admissible(&self) -> bool {
        !self.is_negative()
    }
}

/// Exact rational `numer / denom`.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}
