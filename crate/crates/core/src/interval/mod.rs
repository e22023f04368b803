//! Floating-point intervals as sets of reals.
//!
//! An [`Interval`] is either empty or the set `{x ∈ ℝ | lo ≤ x ≤ hi}` where
//! an infinite bound means that side is unconstrained. Infinities are bound
//! values only, never members. Every operation here is the smallest
//! floating-point interval containing the exact relational image, so the
//! whole module is total: any pair of intervals, including empty and
//! unbounded ones, produces a valid interval.

mod ops;
mod round;
mod text;

use std::fmt;

use thiserror::Error;

pub use ops::{abs, add, div_canonical, div_rel, mul, neg, sqrt_canonical, sqrt_rel, sub};
pub use round::{directed, round_down, round_up, ExactReal, ExtendedFloat};
pub use text::{format_bound, parse_decimal};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("NaN is not a real number")]
    NotANumber,
    #[error("lower bound {lo} exceeds upper bound {hi}")]
    Inverted { lo: f64, hi: f64 },
    #[error("interval has no midpoint (empty or unbounded)")]
    NoMidpoint,
    #[error("invalid interval syntax: {0}")]
    Syntax(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Repr {
    Empty,
    Span { lo: f64, hi: f64 },
}

/// A closed connected set of reals with floating-point bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval(Repr);

impl Interval {
    pub const EMPTY: Interval = Interval(Repr::Empty);
    pub const ENTIRE: Interval = Interval(Repr::Span { lo: f64::NEG_INFINITY, hi: f64::INFINITY });
    pub const ZERO: Interval = Interval(Repr::Span { lo: 0.0, hi: 0.0 });

    /// Builds `[lo, hi]`. A lower bound of `+∞` or an upper bound of `−∞`
    /// describes no reals and yields the empty interval.
    pub fn new(lo: f64, hi: f64) -> Result<Interval, IntervalError> {
        if lo.is_nan() || hi.is_nan() {
            return Err(IntervalError::NotANumber);
        }
        if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Ok(Interval::EMPTY);
        }
        if lo > hi {
            return Err(IntervalError::Inverted { lo, hi });
        }
        Ok(Interval::from_raw(lo, hi))
    }

    /// The singleton `{v}` for finite `v`.
    pub fn point(v: f64) -> Result<Interval, IntervalError> {
        if !v.is_finite() {
            return Err(IntervalError::NotANumber);
        }
        Ok(Interval::from_raw(v, v))
    }

    /// Caller guarantees `lo <= hi`, neither is NaN, `lo != +∞`, `hi != −∞`.
    pub(crate) fn from_raw(lo: f64, hi: f64) -> Interval {
        debug_assert!(lo <= hi, "inverted bounds {lo} > {hi}");
        debug_assert!(lo != f64::INFINITY && hi != f64::NEG_INFINITY);
        Interval(Repr::Span { lo: lo + 0.0, hi: hi + 0.0 })
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.0, Repr::Empty)
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        match self.0 {
            Repr::Empty => None,
            Repr::Span { lo, hi } => Some((lo, hi)),
        }
    }

    pub fn lo(&self) -> Option<f64> {
        self.bounds().map(|b| b.0)
    }

    pub fn hi(&self) -> Option<f64> {
        self.bounds().map(|b| b.1)
    }

    pub fn is_bounded(&self) -> bool {
        match self.0 {
            Repr::Empty => true,
            Repr::Span { lo, hi } => lo.is_finite() && hi.is_finite(),
        }
    }

    /// Non-empty with `lo == hi`.
    pub fn is_singleton(&self) -> bool {
        matches!(self.0, Repr::Span { lo, hi } if lo == hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        match self.0 {
            Repr::Empty => false,
            Repr::Span { lo, hi } => x.is_finite() && lo <= x && x <= hi,
        }
    }

    /// `self ⊂ other` as sets of reals.
    pub fn is_subset(&self, other: &Interval) -> bool {
        match (self.0, other.0) {
            (Repr::Empty, _) => true,
            (_, Repr::Empty) => false,
            (Repr::Span { lo: a, hi: b }, Repr::Span { lo: c, hi: d }) => c <= a && b <= d,
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        match (self.0, other.0) {
            (Repr::Span { lo: a, hi: b }, Repr::Span { lo: c, hi: d }) => {
                let lo = a.max(c);
                let hi = b.min(d);
                if lo <= hi {
                    Interval::from_raw(lo, hi)
                } else {
                    Interval::EMPTY
                }
            }
            _ => Interval::EMPTY,
        }
    }

    /// Smallest interval containing both operands; `EMPTY` is the identity.
    pub fn hull_union(&self, other: &Interval) -> Interval {
        match (self.0, other.0) {
            (Repr::Empty, _) => *other,
            (_, Repr::Empty) => *self,
            (Repr::Span { lo: a, hi: b }, Repr::Span { lo: c, hi: d }) => Interval::from_raw(a.min(c), b.max(d)),
        }
    }

    /// `hi − lo` rounded up; `+∞` when unbounded and `0` for the empty set.
    pub fn width(&self) -> f64 {
        match self.0 {
            Repr::Empty => 0.0,
            Repr::Span { lo, hi } if lo.is_finite() && hi.is_finite() => directed::sub_up(hi, lo),
            Repr::Span { .. } => f64::INFINITY,
        }
    }

    /// Round-to-nearest midpoint of a bounded non-empty interval; always a
    /// member of the interval.
    pub fn midpoint(&self) -> Result<f64, IntervalError> {
        match self.0 {
            Repr::Span { lo, hi } if lo.is_finite() && hi.is_finite() => {
                let m = if lo == hi { lo } else { 0.5 * lo + 0.5 * hi };
                Ok(m.clamp(lo, hi) + 0.0)
            }
            _ => Err(IntervalError::NoMidpoint),
        }
    }

    pub(crate) fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Repr::Empty => f.write_str("empty"),
            Repr::Span { lo, hi } => {
                f.write_str("[")?;
                text::write_bound(f, lo)?;
                f.write_str(",")?;
                text::write_bound(f, hi)?;
                f.write_str("]")
            }
        }
    }
}

/// `□` applied to an interval-shaped set of reals: `None` is the empty set,
/// `Some((lo, hi))` is `{x | lo ≤ x ≤ hi}`. With `lo > hi` the set is empty.
pub fn hull_bounds(bounds: Option<(&ExactReal, &ExactReal)>) -> Interval {
    match bounds {
        None => Interval::EMPTY,
        Some((lo, hi)) => {
            if lo > hi || *lo == ExactReal::PosInf || *hi == ExactReal::NegInf {
                return Interval::EMPTY;
            }
            Interval::from_raw(round_down(lo).value(), round_up(hi).value())
        }
    }
}

/// A finite ordered product of intervals.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct IntervalBox(Vec<Interval>);

impl IntervalBox {
    pub fn new(dims: Vec<Interval>) -> Self {
        IntervalBox(dims)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn dims(&self) -> &[Interval] {
        &self.0
    }

    pub fn into_dims(self) -> Vec<Interval> {
        self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().any(Interval::is_empty)
    }

    pub fn is_bounded(&self) -> bool {
        self.0.iter().all(Interval::is_bounded)
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.0.len() && self.0.iter().zip(point).all(|(iv, &x)| iv.contains(x))
    }

    /// Coordinatewise inclusion. An empty box is a subset of any box of the
    /// same arity.
    pub fn is_subset(&self, other: &IntervalBox) -> bool {
        self.0.len() == other.0.len() && (self.is_empty() || self.0.iter().zip(&other.0).all(|(a, b)| a.is_subset(b)))
    }

    /// Index of the widest coordinate, lowest index on ties.
    pub fn widest(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, iv) in self.0.iter().enumerate() {
            let w = iv.width();
            if best.is_none_or(|(_, bw)| w > bw) {
                best = Some((i, w));
            }
        }
        best.map(|(i, _)| i)
    }
}

impl std::ops::Index<usize> for IntervalBox {
    type Output = Interval;

    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl FromIterator<Interval> for IntervalBox {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        IntervalBox(iter.into_iter().collect())
    }
}

impl fmt::Display for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, iv) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}
