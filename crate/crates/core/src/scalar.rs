//! Coefficient fields shared by the exact and floating pipelines.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};

/// Arbitrary-precision rational number used by the exact pipeline.
pub type Rational = BigRational;

/// A field usable as a form coefficient or matrix entry.
///
/// Implemented for [`Rational`] (exact) and `f64` (floating). Pivoting in
/// eliminations uses the largest absolute value, which is deterministic in
/// both cases.
pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Num + Signed + Send + Sync + 'static
{
    fn from_i64(value: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Nearest representable value; exact for rationals when `value` is finite.
    fn from_f64_lossy(value: f64) -> Self;

    fn from_rational(value: &Rational) -> Self;

    /// True when arithmetic is exact, so `is_zero` is a real zero test.
    fn is_exact() -> bool;
}

impl Scalar for Rational {
    fn from_i64(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64_lossy(value: f64) -> Self {
        BigRational::from_float(value).unwrap_or_default()
    }

    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }

    fn is_exact() -> bool {
        true
    }
}

impl Scalar for f64 {
    fn from_i64(value: i64) -> Self {
        value as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64_lossy(value: f64) -> Self {
        value
    }

    fn from_rational(value: &Rational) -> Self {
        ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
    }

    fn is_exact() -> bool {
        false
    }
}

/// Shorthand for the rational `num/den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for the integer rational `value`.
pub fn int(value: i64) -> Rational {
    BigRational::from_integer(BigInt::from(value))
}

/// Parses `"p/q"` or `"p"` into a rational in lowest terms.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(text.parse().ok()?)),
    }
}

/// Canonical `"p/q"` text with positive denominator and lowest terms.
pub fn format_rational(value: &Rational) -> String {
    // BigRational is always reduced with a positive denominator.
    format!("{}/{}", value.numer(), value.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        let value = rat(-6, 8);
        assert_eq!(format_rational(&value), "-3/4");
        assert_eq!(parse_rational("-3/4"), Some(value));
        assert_eq!(parse_rational("5"), Some(int(5)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(format_rational(&int(2)), "2/1");
    }
}
