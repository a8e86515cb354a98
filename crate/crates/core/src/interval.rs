//! Integer-endpoint time intervals with independently open or closed bounds.
//!
//! Every guard, reset set, region, zone and duration range in the crate is an
//! [`Interval`]. Empty intervals cannot be constructed; operations whose
//! result could be empty return `Option`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::time::{Rational, TimePoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("interval is empty: {0}")]
    Empty(String),
    #[error("infinity can only appear as an open upper bound")]
    InfiniteLower,
    #[error("cannot parse interval `{0}`")]
    Syntax(String),
}

/// One endpoint of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bound {
    Closed(u64),
    Open(u64),
    /// `+inf`, always open.
    Infinite,
}

impl Bound {
    pub fn value(&self) -> Option<u64> {
        match *self {
            Bound::Closed(v) | Bound::Open(v) => Some(v),
            Bound::Infinite => None,
        }
    }

    pub fn is_open(&self) -> bool {
        !matches!(self, Bound::Closed(_))
    }

    fn finite(value: u64, open: bool) -> Bound {
        if open {
            Bound::Open(value)
        } else {
            Bound::Closed(value)
        }
    }

    /// Orders lower bounds by how much they admit: a smaller key admits more.
    fn lower_key(&self) -> (u64, bool) {
        match *self {
            Bound::Closed(v) => (v, false),
            Bound::Open(v) => (v, true),
            Bound::Infinite => (u64::MAX, true),
        }
    }

    /// Orders upper bounds by how much they admit: a larger key admits more.
    fn upper_key(&self) -> (u64, bool) {
        match *self {
            Bound::Closed(v) => (v, true),
            Bound::Open(v) => (v, false),
            Bound::Infinite => (u64::MAX, true),
        }
    }
}

/// A nonempty interval of `[0, +inf)` with integer (or infinite upper) endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    lower: Bound,
    upper: Bound,
}

impl Interval {
    pub fn new(lower: Bound, upper: Bound) -> Result<Self, IntervalError> {
        if lower == Bound::Infinite {
            return Err(IntervalError::InfiniteLower);
        }
        let interval = Interval { lower, upper };
        if let (Some(lo), Some(hi)) = (lower.value(), upper.value()) {
            if lo > hi || (lo == hi && (lower.is_open() || upper.is_open())) {
                return Err(IntervalError::Empty(interval.to_string()));
            }
        }
        Ok(interval)
    }

    /// `[lo, hi]`; panics when `lo > hi`.
    pub fn closed(lo: u64, hi: u64) -> Self {
        Interval::new(Bound::Closed(lo), Bound::Closed(hi)).expect("closed interval with lo > hi")
    }

    /// `(lo, hi)`; panics when `lo >= hi`.
    pub fn open(lo: u64, hi: u64) -> Self {
        Interval::new(Bound::Open(lo), Bound::Open(hi)).expect("empty open interval")
    }

    pub fn point(value: u64) -> Self {
        Interval::closed(value, value)
    }

    /// `(lo, +inf)`.
    pub fn unbounded_open(lo: u64) -> Self {
        Interval { lower: Bound::Open(lo), upper: Bound::Infinite }
    }

    /// `[lo, +inf)`.
    pub fn unbounded_closed(lo: u64) -> Self {
        Interval { lower: Bound::Closed(lo), upper: Bound::Infinite }
    }

    pub fn lower(&self) -> Bound {
        self.lower
    }

    pub fn upper(&self) -> Bound {
        self.upper
    }

    pub fn lower_value(&self) -> u64 {
        self.lower.value().expect("lower bound is always finite")
    }

    pub fn upper_value(&self) -> Option<u64> {
        self.upper.value()
    }

    pub fn is_bounded(&self) -> bool {
        self.upper != Bound::Infinite
    }

    pub fn is_closed(&self) -> bool {
        matches!((self.lower, self.upper), (Bound::Closed(_), Bound::Closed(_)))
    }

    pub fn is_point(&self) -> bool {
        matches!((self.lower, self.upper), (Bound::Closed(a), Bound::Closed(b)) if a == b)
    }

    /// `{t1 + t2 | t1 in self, t2 in other}`.
    pub fn add(&self, other: &Interval) -> Interval {
        let lower = Bound::finite(
            self.lower_value() + other.lower_value(),
            self.lower.is_open() || other.lower.is_open(),
        );
        let upper = match (self.upper, other.upper) {
            (Bound::Infinite, _) | (_, Bound::Infinite) => Bound::Infinite,
            (a, b) => Bound::finite(
                a.value().unwrap() + b.value().unwrap(),
                a.is_open() || b.is_open(),
            ),
        };
        Interval { lower, upper }
    }

    /// `{|t1 - t2| | t1 in self, t2 in other}`.
    pub fn distance(&self, other: &Interval) -> Interval {
        let lower = if self.intersects(other) {
            Bound::Closed(0)
        } else {
            // disjoint: one lies entirely below the other
            let (below, above) = if self.precedes(other) { (self, other) } else { (other, self) };
            let gap_from = below.upper;
            let gap_to = above.lower;
            Bound::finite(
                gap_to.value().unwrap() - gap_from.value().unwrap(),
                gap_from.is_open() || gap_to.is_open(),
            )
        };
        let upper = match (self.upper, other.upper) {
            (Bound::Infinite, _) | (_, Bound::Infinite) => Bound::Infinite,
            (a_hi, b_hi) => {
                let spread = |hi: Bound, lo: Bound| -> (i64, bool) {
                    (
                        hi.value().unwrap() as i64 - lo.value().unwrap() as i64,
                        hi.is_open() || lo.is_open(),
                    )
                };
                let (v1, open1) = spread(b_hi, self.lower);
                let (v2, open2) = spread(a_hi, other.lower);
                let (value, open) = match v1.cmp(&v2) {
                    Ordering::Greater => (v1, open1),
                    Ordering::Less => (v2, open2),
                    Ordering::Equal => (v1, open1 && open2),
                };
                Bound::finite(value.max(0) as u64, open)
            }
        };
        Interval { lower, upper }
    }

    /// Exact membership of a time point.
    pub fn contains(&self, t: TimePoint) -> bool {
        let v = t.value();
        let above_lower = match self.lower {
            Bound::Closed(lo) => v >= ratio(lo),
            Bound::Open(lo) => v > ratio(lo),
            Bound::Infinite => false,
        };
        let below_upper = match self.upper {
            Bound::Closed(hi) => v <= ratio(hi),
            Bound::Open(hi) => v < ratio(hi),
            Bound::Infinite => true,
        };
        above_lower && below_upper
    }

    /// True iff every point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        self.lower.lower_key() >= other.lower.lower_key()
            && self.upper.upper_key() <= other.upper.upper_key()
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let lower = if self.lower.lower_key() >= other.lower.lower_key() {
            self.lower
        } else {
            other.lower
        };
        let upper = if self.upper.upper_key() <= other.upper.upper_key() {
            self.upper
        } else {
            other.upper
        };
        Interval::new(lower, upper).ok()
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.intersection(other).is_some()
    }

    /// True iff every point of `self` is strictly below every point of `other`.
    pub fn precedes(&self, other: &Interval) -> bool {
        match (self.upper, other.lower) {
            (Bound::Infinite, _) => false,
            (hi, lo) => {
                let (h, l) = (hi.value().unwrap(), lo.value().unwrap());
                h < l || (h == l && (hi.is_open() || lo.is_open()))
            }
        }
    }

    /// Replaces an upper bound beyond `ceiling` with the closed bound
    /// `ceiling + 1`, leaving membership of every `t <= ceiling` unchanged.
    /// An interval starting above the ceiling is capped just past its own
    /// lower bound instead, so the result is never empty.
    pub fn cap_upper(&self, ceiling: u64) -> Interval {
        let ceiling = ceiling.max(self.lower_value());
        let beyond = match self.upper {
            Bound::Infinite => true,
            b => b.value().unwrap() > ceiling,
        };
        if beyond {
            Interval { lower: self.lower, upper: Bound::Closed(ceiling + 1) }
        } else {
            *self
        }
    }

    /// Every unit region (`[k,k]` or `(k,k+1)`) that meets this interval,
    /// in ascending order, stopping at `limit` for unbounded intervals.
    pub fn regions_up_to(&self, limit: u64) -> Vec<Interval> {
        let lo = self.lower_value();
        let hi = self.upper_value().unwrap_or(limit).max(lo);
        let mut out = Vec::new();
        for k in lo..=hi {
            let point = Interval::point(k);
            if self.is_subset_of(&point) || point.is_subset_of(self) {
                out.push(point);
            }
            if k < hi || !self.is_bounded() {
                let segment = Interval::open(k, k + 1);
                if segment.is_subset_of(self) {
                    out.push(segment);
                }
            }
        }
        out
    }
}

fn ratio(v: u64) -> Rational {
    Rational::from_integer(v as i64)
}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ascending by lower bound (closed before open), then by upper bound.
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lower
            .lower_key()
            .cmp(&other.lower.lower_key())
            .then_with(|| self.upper.upper_key().cmp(&other.upper.upper_key()))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lower {
            Bound::Closed(v) => write!(f, "[{v},")?,
            Bound::Open(v) => write!(f, "({v},")?,
            Bound::Infinite => write!(f, "(inf,")?,
        }
        match self.upper {
            Bound::Closed(v) => write!(f, "{v}]"),
            Bound::Open(v) => write!(f, "{v})"),
            Bound::Infinite => write!(f, "inf)"),
        }
    }
}

impl FromStr for Interval {
    type Err = IntervalError;

    /// Parses `[a,b]`, `(a,b)`, `[a,b)`, `(a,b]` and `(a,inf)`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let syntax = || IntervalError::Syntax(text.to_string());
        let s = text.trim();
        let mut chars = s.chars();
        let open_lo = match chars.next() {
            Some('[') => false,
            Some('(') => true,
            _ => return Err(syntax()),
        };
        let open_hi = match s.chars().last() {
            Some(']') => false,
            Some(')') => true,
            _ => return Err(syntax()),
        };
        if s.len() < 2 {
            return Err(syntax());
        }
        let body = &s[1..s.len() - 1];
        let (lo, hi) = body.split_once(',').ok_or_else(syntax)?;
        let lo: u64 = lo.trim().parse().map_err(|_| syntax())?;
        let hi = hi.trim();
        let upper = if matches!(hi, "inf" | "+inf" | "∞" | "+∞") {
            if !open_hi {
                return Err(IntervalError::Syntax(format!("{text}: infinity must be open")));
            }
            Bound::Infinite
        } else {
            Bound::finite(hi.parse().map_err(|_| syntax())?, open_hi)
        };
        Interval::new(Bound::finite(lo, open_lo), upper)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
