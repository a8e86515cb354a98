//! Small difference-bound matrices over exact rationals.
//!
//! Entry `(i, j)` bounds `v_i - v_j`; variable 0 is the constant zero.

use std::cmp::Ordering;
use std::fmt;

use crate::interval::{Bound, Interval};
use crate::time::Rational;

/// Upper bound on a difference: `< c`, `<= c`, or none.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Limit {
    Finite { value: Rational, strict: bool },
    Infinite,
}

impl Limit {
    pub fn le(value: Rational) -> Limit {
        Limit::Finite { value, strict: false }
    }

    pub fn lt(value: Rational) -> Limit {
        Limit::Finite { value, strict: true }
    }

    fn plus(self, other: Limit) -> Limit {
        match (self, other) {
            (Limit::Finite { value: a, strict: s }, Limit::Finite { value: b, strict: t }) => {
                Limit::Finite { value: a + b, strict: s || t }
            }
            _ => Limit::Infinite,
        }
    }

    /// A diagonal entry below `<= 0` means the matrix is empty.
    fn is_negative_cycle(self) -> bool {
        match self {
            Limit::Finite { value, strict } => value < Rational::from_integer(0) || (strict && value == Rational::from_integer(0)),
            Limit::Infinite => false,
        }
    }
}

impl Ord for Limit {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Limit::Infinite, Limit::Infinite) => Ordering::Equal,
            (Limit::Infinite, _) => Ordering::Greater,
            (_, Limit::Infinite) => Ordering::Less,
            (Limit::Finite { value: a, strict: s }, Limit::Finite { value: b, strict: t }) => {
                // `< c` is tighter than `<= c`
                a.cmp(b).then_with(|| t.cmp(s))
            }
        }
    }
}

impl PartialOrd for Limit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Infinite => write!(f, "inf"),
            Limit::Finite { value, strict } => write!(f, "{}{}", if *strict { "<" } else { "<=" }, value),
        }
    }
}

/// A convex set of valuations of `dim - 1` real variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dbm {
    dim: usize,
    m: Vec<Limit>,
    empty: bool,
}

impl Dbm {
    /// All variables non-negative and otherwise unconstrained.
    pub fn universe(vars: usize) -> Dbm {
        let dim = vars + 1;
        let mut m = vec![Limit::Infinite; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = Limit::le(Rational::from_integer(0));
            m[i] = Limit::le(Rational::from_integer(0));
        }
        Dbm { dim, m, empty: false }
    }

    /// No sign constraint on any variable.
    pub fn unrestricted(vars: usize) -> Dbm {
        let dim = vars + 1;
        let mut m = vec![Limit::Infinite; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = Limit::le(Rational::from_integer(0));
        }
        Dbm { dim, m, empty: false }
    }

    pub fn vars(&self) -> usize {
        self.dim - 1
    }

    pub fn get(&self, i: usize, j: usize) -> Limit {
        self.m[i * self.dim + j]
    }

    fn set(&mut self, i: usize, j: usize, l: Limit) {
        self.m[i * self.dim + j] = l;
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// Tightens `v_i - v_j` and restores canonical form.
    pub fn constrain(&mut self, i: usize, j: usize, l: Limit) {
        if self.empty || l >= self.get(i, j) {
            return;
        }
        self.set(i, j, l);
        if l.plus(self.get(j, i)).is_negative_cycle() {
            self.empty = true;
            return;
        }
        // incremental closure through the new edge
        let n = self.dim;
        for a in 0..n {
            let ai = self.get(a, i);
            if ai == Limit::Infinite {
                continue;
            }
            for b in 0..n {
                let via = ai.plus(l).plus(self.get(j, b));
                if via < self.get(a, b) {
                    self.set(a, b, via);
                }
            }
        }
        for a in 0..n {
            if self.get(a, a).is_negative_cycle() {
                self.empty = true;
                return;
            }
        }
    }

    /// `v_i - v_j ∈ shift + iv`, where `iv` is an interval of the time axis.
    pub fn constrain_difference(&mut self, i: usize, j: usize, iv: &Interval, shift: Rational) {
        let lo = Rational::from_integer(iv.lower_value() as i64) + shift;
        let lower_strict = matches!(iv.lower(), Bound::Open(_));
        self.constrain(j, i, Limit::Finite { value: -lo, strict: lower_strict });
        match iv.upper() {
            Bound::Closed(h) => self.constrain(i, j, Limit::le(Rational::from_integer(h as i64) + shift)),
            Bound::Open(h) => self.constrain(i, j, Limit::lt(Rational::from_integer(h as i64) + shift)),
            Bound::Infinite => {}
        }
    }

    /// `v_i ∈ iv`.
    pub fn constrain_var(&mut self, i: usize, iv: &Interval) {
        self.constrain_difference(i, 0, iv, Rational::from_integer(0));
    }

    /// `v_i - v_j = c`.
    pub fn constrain_eq(&mut self, i: usize, j: usize, c: Rational) {
        self.constrain(i, j, Limit::le(c));
        self.constrain(j, i, Limit::le(-c));
    }

    /// Lets every variable grow by the same non-negative amount.
    pub fn up(&mut self) {
        for i in 1..self.dim {
            self.set(i, 0, Limit::Infinite);
        }
    }

    /// Forgets everything about `v_i` except `v_i >= 0`.
    pub fn free(&mut self, i: usize) {
        if self.empty {
            return;
        }
        for j in 0..self.dim {
            if j != i {
                self.set(i, j, Limit::Infinite);
                let j0 = self.get(j, 0);
                self.set(j, i, j0);
            }
        }
        self.set(0, i, Limit::le(Rational::from_integer(0)));
    }

    /// Whether every valuation of `other` is in `self`. Both must be canonical.
    pub fn includes(&self, other: &Dbm) -> bool {
        if other.empty {
            return true;
        }
        if self.empty {
            return false;
        }
        self.m.iter().zip(&other.m).all(|(a, b)| b <= a)
    }

    /// `[lo, hi]` of variable `i` as (lower limit on `-v_i`, upper limit on `v_i`).
    pub fn range(&self, i: usize) -> (Limit, Limit) {
        (self.get(0, i), self.get(i, 0))
    }

    pub fn contains(&self, point: &[Rational]) -> bool {
        if self.empty {
            return false;
        }
        let val = |k: usize| if k == 0 { Rational::from_integer(0) } else { point[k - 1] };
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| match self.get(i, j) {
                Limit::Infinite => true,
                Limit::Finite { value, strict } => {
                    let d = val(i) - val(j);
                    if strict {
                        d < value
                    } else {
                        d <= value
                    }
                }
            })
        })
    }

    /// Some valuation inside, preferring midpoints. Variables are fixed one at
    /// a time in index order.
    pub fn pick_point(&self) -> Option<Vec<Rational>> {
        if self.empty {
            return None;
        }
        let mut d = self.clone();
        let mut point = Vec::with_capacity(self.vars());
        for i in 1..self.dim {
            let (lo, hi) = d.range(i);
            let one = Rational::from_integer(1);
            let v = match (lo, hi) {
                (Limit::Finite { value: l, .. }, Limit::Finite { value: h, .. }) if -l == h => h,
                (Limit::Finite { value: l, .. }, Limit::Finite { value: h, .. }) => (h - l) / Rational::from_integer(2),
                (Limit::Finite { value: l, .. }, Limit::Infinite) => -l + one,
                (Limit::Infinite, Limit::Finite { value: h, .. }) => h - one,
                (Limit::Infinite, Limit::Infinite) => Rational::from_integer(0),
            };
            d.constrain_eq(i, 0, v);
            if d.is_empty() {
                return None;
            }
            point.push(v);
        }
        Some(point)
    }
}
