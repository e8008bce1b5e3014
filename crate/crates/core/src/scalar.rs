//! Real scalar fields the operator algebra can be instantiated over.
//!
//! Coefficients of [`OperatorSum`](crate::OperatorSum) are `Complex<T>` for a
//! [`Scalar`] `T`. Floating types prune tiny coefficients against a threshold;
//! exact types only ever drop exact zeros.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

pub trait Scalar:
    Clone + Debug + Display + PartialEq + PartialOrd + Num + Signed + Neg<Output = Self> + Send + Sync + 'static
{
    /// True when arithmetic is exact and pruning only removes zeros.
    const EXACT: bool;

    /// Converts a finite `f64`. Exact types convert the binary value exactly.
    fn from_f64(x: f64) -> Self;

    fn from_i64(x: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Text form used by the operator term format.
    fn to_text(&self) -> String {
        format!("{self}")
    }

    fn parse_text(s: &str) -> Option<Self>;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Whether a coefficient should be dropped from a sum.
    fn negligible(c: &Complex<Self>, threshold: f64) -> bool {
        if Self::EXACT {
            c.re.is_zero() && c.im.is_zero()
        } else {
            let (re, im) = (c.re.to_f64(), c.im.to_f64());
            re * re + im * im < threshold * threshold
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_i64(x: i64) -> Self {
        x as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_text(&self) -> String {
        format!("{self:?}")
    }

    fn parse_text(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_f64(x: f64) -> Self {
        x as f32
    }

    fn from_i64(x: i64) -> Self {
        x as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn to_text(&self) -> String {
        format!("{self:?}")
    }

    fn parse_text(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite coupling")
    }

    fn from_i64(x: i64) -> Self {
        BigRational::from_integer(BigInt::from_i64(x).unwrap())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_text(s: &str) -> Option<Self> {
        if let Ok(r) = s.parse::<BigRational>() {
            return Some(r);
        }
        s.parse::<f64>().ok().filter(|x| x.is_finite()).and_then(BigRational::from_float)
    }
}

/// `i^k` as a complex number over `T`.
pub(crate) fn i_pow<T: Scalar>(k: u8) -> Complex<T> {
    match k & 3 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

pub(crate) fn real<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

pub(crate) fn to_c64<T: Scalar>(c: &Complex<T>) -> Complex<f64> {
    Complex::new(c.re.to_f64(), c.im.to_f64())
}
