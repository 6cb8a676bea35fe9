//! Probability arithmetic.
//!
//! Every routine that manipulates probability mass is generic over [`Prob`], which has two
//! implementations:
//!
//! - `f64`: the fast path. Totals are accepted within [`TAU_MASS`], and threshold
//!   comparisons `a >= t` are evaluated as `a >= t - TAU_CMP`.
//! - [`Exact`] (arbitrary-precision rationals): every comparison is exact, which makes
//!   boundary cases such as "excess distortion equals epsilon" checkable bit for bit.

use core::fmt;
use core::ops::{Add, Div, Mul, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};

use crate::error::{LossyError, Result};

/// Tolerance for "a probability vector sums to one" in float mode.
pub const TAU_MASS: f64 = 1e-9;

/// Slack for threshold inequalities in float mode.
pub const TAU_CMP: f64 = 1e-12;

/// Exact rational probabilities.
pub type Exact = BigRational;

pub trait Prob:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    /// True for the exact rational implementation.
    const EXACT: bool;

    fn from_ratio(num: u64, den: u64) -> Self;

    /// Conversion from a float. Rationals take the shortest decimal that round-trips,
    /// so `0.3_f64` becomes `3/10` rather than its binary expansion.
    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Threshold test `self >= threshold` under the module's comparison convention.
    fn at_least(&self, threshold: &Self) -> bool;

    /// Whether a total mass counts as one.
    fn is_unit_total(&self) -> bool;

    /// Parses a decimal literal (`"0.25"`, `"1e-3"`) or a fraction `"p/q"`.
    fn parse(text: &str) -> Result<Self>;

    fn to_json(&self) -> serde_json::Value;

    fn sum<'a, I: IntoIterator<Item = &'a Self>>(items: I) -> Self {
        items.into_iter().fold(Self::zero(), |acc, p| acc + p.clone())
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Prob for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn at_least(&self, threshold: &Self) -> bool {
        *self >= *threshold - TAU_CMP
    }

    fn is_unit_total(&self) -> bool {
        (*self - 1.0).abs() <= TAU_MASS
    }

    fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| bad_number(text))?;
            let d: f64 = d.trim().parse().map_err(|_| bad_number(text))?;
            if d == 0.0 {
                return Err(bad_number(text));
            }
            return Ok(n / d);
        }
        let v: f64 = text.parse().map_err(|_| bad_number(text))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad_number(text))
        }
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(*self)
    }
}

impl Prob for Exact {
    const EXACT: bool = true;

    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Self {
        // Rust's Display prints the shortest decimal that round-trips.
        parse_decimal(&format!("{v}")).expect("finite float prints as a decimal")
    }

    fn to_f64(&self) -> f64 {
        self.to_f64_lossy()
    }

    fn at_least(&self, threshold: &Self) -> bool {
        self >= threshold
    }

    fn is_unit_total(&self) -> bool {
        self.is_one()
    }

    fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad_number(text))?;
            let d: BigInt = d.trim().parse().map_err(|_| bad_number(text))?;
            if d.is_zero() {
                return Err(bad_number(text));
            }
            return Ok(BigRational::new(n, d));
        }
        parse_decimal(text)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format!("{}/{}", self.numer(), self.denom()))
    }
}

trait LossyFloat {
    fn to_f64_lossy(&self) -> f64;
}

impl LossyFloat for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        if let Some(v) = ToPrimitive::to_f64(self) {
            if v.is_finite() {
                return v;
            }
        }
        // Huge numerator/denominator: shift both down to a comparable scale first.
        let shift = self.numer().bits().max(self.denom().bits()).saturating_sub(1000);
        let n = self.numer() >> shift;
        let d = self.denom() >> shift;
        n.to_f64().unwrap_or(0.0) / d.to_f64().unwrap_or(f64::INFINITY)
    }
}

fn bad_number(text: &str) -> LossyError {
    LossyError::Schema(format!("cannot parse probability {text:?}"))
}

/// Exact parse of a decimal literal with optional exponent.
fn parse_decimal(text: &str) -> Result<Exact> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = text[pos + 1..].parse().map_err(|_| bad_number(text))?;
            (&text[..pos], exp)
        }
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad_number(text));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad_number(text));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = digits.parse().map_err(|_| bad_number(text))?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u8);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// `true` when `p` is a valid probability in `[0, 1]`.
pub(crate) fn in_unit_interval<P: Prob>(p: &P) -> bool {
    *p >= P::zero() && *p <= P::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parse_is_exact() {
        assert_eq!(Exact::parse("0.3").unwrap(), Exact::from_ratio(3, 10));
        assert_eq!(Exact::parse("2.5e-1").unwrap(), Exact::from_ratio(1, 4));
        assert_eq!(Exact::parse("1/3").unwrap(), Exact::from_ratio(1, 3));
        assert_eq!(Exact::from_f64(0.1), Exact::from_ratio(1, 10));
        assert!(Exact::parse("abc").is_err());
        assert!(Exact::parse("1/0").is_err());
    }

    #[test]
    fn float_threshold_has_slack() {
        let t = 0.8_f64;
        assert!((0.8 - 1e-14).at_least(&t));
        assert!(!(0.8 - 1e-9).at_least(&t));
        let e = Exact::from_ratio(4, 5);
        assert!(!(e.clone() - Exact::from_ratio(1, 1_000_000_000_000_000)).at_least(&e));
    }

    #[test]
    fn json_forms() {
        assert_eq!(Exact::from_ratio(1, 3).to_json(), serde_json::json!("1/3"));
        assert_eq!(0.5_f64.to_json(), serde_json::json!(0.5));
        assert_eq!(f64::parse("1/4").unwrap(), 0.25);
    }
}
