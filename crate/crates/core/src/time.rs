//! Exact non-negative time instants.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Rational used for every time quantity. Model constants are small integers
/// and timestamps are short decimals, so 64-bit numerators never get close to
/// overflow in practice.
pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeParseError {
    #[error("empty time value")]
    Empty,
    #[error("`{0}` is not a decimal or p/q rational")]
    Malformed(String),
    #[error("`{0}` is negative")]
    Negative(String),
    #[error("`{0}` has too many digits")]
    Overflow(String),
}

/// A point on the non-negative time axis, held as an exact rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TimePoint(Rational);

impl TimePoint {
    pub const ZERO: TimePoint = TimePoint(Ratio::new_raw(0, 1));

    /// Returns `None` for negative values.
    pub fn new(value: Rational) -> Option<Self> {
        (!value.is_negative()).then_some(TimePoint(value))
    }

    pub fn from_integer(value: u32) -> Self {
        TimePoint(Rational::from_integer(i64::from(value)))
    }

    /// `numer / denom`; panics on a zero denominator or a negative result.
    pub fn from_fraction(numer: i64, denom: i64) -> Self {
        TimePoint::new(Rational::new(numer, denom)).expect("negative time point")
    }

    pub fn value(&self) -> Rational {
        self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> i64 {
        self.0.ceil().to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `self - earlier`, or `None` when `earlier > self`.
    pub fn since(&self, earlier: TimePoint) -> Option<TimePoint> {
        TimePoint::new(self.0 - earlier.0)
    }
}

impl Add for TimePoint {
    type Output = TimePoint;

    fn add(self, rhs: TimePoint) -> TimePoint {
        TimePoint(self.0 + rhs.0)
    }
}

/// Saturates at zero.
impl Sub for TimePoint {
    type Output = TimePoint;

    fn sub(self, rhs: TimePoint) -> TimePoint {
        self.since(rhs).unwrap_or(TimePoint::ZERO)
    }
}

impl From<u32> for TimePoint {
    fn from(value: u32) -> Self {
        TimePoint::from_integer(value)
    }
}

impl FromStr for TimePoint {
    type Err = TimeParseError;

    /// Accepts `3`, `1.25`, `.5` and `7/3`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let s = text.trim();
        if s.is_empty() {
            return Err(TimeParseError::Empty);
        }
        if s.starts_with('-') {
            return Err(TimeParseError::Negative(s.to_string()));
        }
        let malformed = || TimeParseError::Malformed(s.to_string());
        let overflow = || TimeParseError::Overflow(s.to_string());

        if let Some((n, d)) = s.split_once('/') {
            let numer: i64 = parse_digits(n.trim()).ok_or_else(malformed)?;
            let denom: i64 = parse_digits(d.trim()).ok_or_else(malformed)?;
            if denom == 0 {
                return Err(malformed());
            }
            return Ok(TimePoint(Rational::new(numer, denom)));
        }

        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(malformed());
        }
        let whole: i64 = if int_part.is_empty() {
            0
        } else {
            parse_digits(int_part).ok_or_else(malformed)?
        };
        if frac_part.is_empty() {
            return Ok(TimePoint(Rational::from_integer(whole)));
        }
        let frac: i64 = parse_digits(frac_part).ok_or_else(malformed)?;
        let exp = u32::try_from(frac_part.len()).map_err(|_| overflow())?;
        let denom = 10i64.checked_pow(exp).ok_or_else(overflow)?;
        let numer = whole
            .checked_mul(denom)
            .and_then(|w| w.checked_add(frac))
            .ok_or_else(overflow)?;
        Ok(TimePoint(Rational::new(numer, denom)))
    }
}

fn parse_digits(s: &str) -> Option<i64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl fmt::Display for TimePoint {
    /// Terminating decimals print as decimals with at least one fractional
    /// digit (`1.0`, `0.25`); anything else prints as `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let numer = *self.0.numer();
        let denom = *self.0.denom();
        let (twos, rest) = strip_factor(denom, 2);
        let (fives, rest) = strip_factor(rest, 5);
        if rest != 1 {
            return write!(f, "{numer}/{denom}");
        }
        let digits = twos.max(fives).max(1);
        let scale = 10i64.pow(digits);
        let (whole, frac) = (numer * (scale / denom)).div_rem(&scale);
        write!(f, "{whole}.{frac:0width$}", width = digits as usize)?;
        Ok(())
    }
}

/// Returns the multiplicity of `p` in `n` and the cofactor.
fn strip_factor(mut n: i64, p: i64) -> (u32, i64) {
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    (k, n)
}

impl Serialize for TimePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TimePoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl Zero for TimePoint {
    fn zero() -> Self {
        TimePoint::ZERO
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}
