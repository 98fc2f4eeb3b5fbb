use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;

/// Entry type for the two storage tiers of [`super::IntMatrix`].
///
/// Arithmetic returns `None` on overflow; the `BigInt` tier never does.
pub trait Scalar: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn to_f64(&self) -> f64;
    fn bits(&self) -> u64;
    /// Converts back from arbitrary precision; `None` if out of range.
    fn from_big(v: &BigInt) -> Option<Self>;
}

impl Scalar for i64 {
    #[inline]
    fn zero() -> Self {
        0
    }
    #[inline]
    fn from_i64(v: i64) -> Self {
        v
    }
    #[inline]
    fn is_zero(&self) -> bool {
        *self == 0
    }
    #[inline]
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    #[inline]
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    #[inline]
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    #[inline]
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    #[inline]
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    #[inline]
    fn to_f64(&self) -> f64 {
        *self as f64
    }
    fn bits(&self) -> u64 {
        64 - self.unsigned_abs().leading_zeros() as u64
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(if self.is_negative() { f64::MIN } else { f64::MAX })
    }
    fn bits(&self) -> u64 {
        BigInt::bits(self)
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
}

pub(crate) fn big_to_i64(v: &BigInt) -> Option<i64> {
    v.to_i64()
}
