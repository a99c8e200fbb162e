//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar (`f32` or `f64`).
///
/// Tolerances throughout the crate are written for double precision; they pass
/// through [`Scalar::tolerance`] so that single precision gets a floor it can
/// actually resolve.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts a literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Maps a nominal double-precision tolerance to one meaningful for `Self`.
    fn tolerance(nominal: f64) -> Self;

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Scalar for f64 {
    #[inline]
    fn tolerance(nominal: f64) -> Self {
        nominal
    }
}

impl Scalar for f32 {
    #[inline]
    fn tolerance(nominal: f64) -> Self {
        nominal.max(64.0 * f32::EPSILON as f64) as f32
    }
}

/// Values that may be `±∞` by convention (divergences with support violations).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Extended<T> {
    NegInfinity,
    Finite(T),
    PosInfinity,
}

impl<T: Scalar> Extended<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    /// The finite value, if any.
    pub fn finite(&self) -> Option<T> {
        match *self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Collapses into the scalar's own infinities.
    pub fn to_scalar(&self) -> T {
        match *self {
            Extended::NegInfinity => T::neg_infinity(),
            Extended::Finite(v) => v,
            Extended::PosInfinity => T::infinity(),
        }
    }

    pub fn map<U: Scalar>(self, f: impl FnOnce(T) -> U) -> Extended<U> {
        match self {
            Extended::NegInfinity => Extended::NegInfinity,
            Extended::Finite(v) => Extended::Finite(f(v)),
            Extended::PosInfinity => Extended::PosInfinity,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f32_tolerance_is_floored() {
        assert!(<f32 as Scalar>::tolerance(1e-12) > 1e-6);
        assert_eq!(<f64 as Scalar>::tolerance(1e-12), 1e-12);
    }

    #[test]
    fn extended_ordering() {
        let a: Extended<f64> = Extended::NegInfinity;
        let b = Extended::Finite(-1e300);
        let c = Extended::Finite(3.0);
        let d = Extended::PosInfinity;
        assert!(a < b && b < c && c < d);
        assert_eq!(d.to_scalar(), f64::INFINITY);
    }
}
