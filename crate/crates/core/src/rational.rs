//! Exact non-negative rationals with checked arithmetic.

use std::fmt;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("rational arithmetic overflowed 128-bit integers")]
pub struct Overflow;

/// A non-negative rational number kept in lowest terms.
///
/// Backed by 128-bit integers; every arithmetic operation is checked and
/// reports [`Overflow`] instead of wrapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<u128>);

impl Rational {
    /// Builds `numerator / denominator`, reduced. Returns `None` for a zero
    /// denominator.
    pub fn new(numerator: u128, denominator: u128) -> Option<Self> {
        if denominator == 0 {
            return None;
        }
        Some(Self(Ratio::new(numerator, denominator)))
    }

    pub fn zero() -> Self {
        Self(Ratio::zero())
    }

    pub fn one() -> Self {
        Self(Ratio::one())
    }

    pub fn from_integer(n: u128) -> Self {
        Self(Ratio::from_integer(n))
    }

    pub fn numerator(&self) -> u128 {
        *self.0.numer()
    }

    pub fn denominator(&self) -> u128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, Overflow> {
        self.0.checked_add(&rhs.0).map(Self).ok_or(Overflow)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, Overflow> {
        self.0.checked_mul(&rhs.0).map(Self).ok_or(Overflow)
    }

    /// `self - rhs`, or `None` when the result would be negative.
    pub fn checked_sub(&self, rhs: &Self) -> Option<Self> {
        if rhs.0 > self.0 {
            return None;
        }
        // Cross-multiplication can overflow even when the result fits; fall
        // back to None in that case too.
        let (a, b) = (self.0.numer(), self.0.denom());
        let (c, d) = (rhs.0.numer(), rhs.0.denom());
        let lhs = u128::checked_mul(*a, *d)?;
        let rhs_n = u128::checked_mul(*c, *b)?;
        let den = u128::checked_mul(*b, *d)?;
        Some(Self(Ratio::new(lhs - rhs_n, den)))
    }

    pub fn checked_pow(&self, exp: u32) -> Result<Self, Overflow> {
        let n = self.numerator().checked_pow(exp).ok_or(Overflow)?;
        let d = self.denominator().checked_pow(exp).ok_or(Overflow)?;
        Ok(Self(Ratio::new(n, d)))
    }

    /// Sum of an iterator of rationals, failing on overflow.
    pub fn checked_sum<'a>(items: impl IntoIterator<Item = &'a Rational>) -> Result<Self, Overflow> {
        items
            .into_iter()
            .try_fold(Self::zero(), |acc, x| acc.checked_add(x))
    }

    pub fn to_f64(&self) -> f64 {
        // Both parts round to the nearest f64 first; exact below 2^53.
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub(crate) fn as_ratio(&self) -> &Ratio<u128> {
        &self.0
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator(), self.denominator())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_lowest_terms() {
        let r = Rational::new(27, 216).unwrap();
        assert_eq!((r.numerator(), r.denominator()), (1, 8));
        assert_eq!(r.to_string(), "1/8");
        assert!(Rational::new(1, 0).is_none());
    }

    #[test]
    fn overflow_is_reported() {
        let big = Rational::new(1, u128::MAX / 3).unwrap();
        let other = Rational::new(1, u128::MAX / 5).unwrap();
        assert_eq!(big.checked_mul(&other), Err(Overflow));
        assert_eq!(Rational::new(1, 10).unwrap().checked_pow(40), Err(Overflow));
    }

    #[test]
    fn subtraction_never_goes_negative() {
        let half = Rational::new(1, 2).unwrap();
        let third = Rational::new(1, 3).unwrap();
        assert_eq!(half.checked_sub(&third), Rational::new(1, 6));
        assert_eq!(third.checked_sub(&half), None);
    }
}
