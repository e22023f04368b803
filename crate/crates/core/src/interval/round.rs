//! Directed rounding between exact reals and binary64.
//!
//! Two layers live here. [`round_down`] and [`round_up`] take an exact
//! extended real (an arbitrary-precision rational or an infinity) and return
//! the adjacent floating-point number below or above it. The `*_down` /
//! `*_up` helpers in [`directed`] do the same for the result of a single
//! float operation, computed in round-to-nearest and then corrected with an
//! error-free transformation (two-sum or a fused multiply-add residual) so the
//! result is the exact neighbour whenever the residual is itself exact.
//! Near the subnormal range the residual can be lost, so the helpers fall
//! back to one conservative outward step.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::IntervalError;

/// A binary64 value that is never NaN. Infinities are admitted.
///
/// Negative zero is folded into positive zero on construction, so equality
/// and ordering agree with the reals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtendedFloat(f64);

impl ExtendedFloat {
    pub const NEG_INFINITY: ExtendedFloat = ExtendedFloat(f64::NEG_INFINITY);
    pub const INFINITY: ExtendedFloat = ExtendedFloat(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self, IntervalError> {
        if value.is_nan() {
            Err(IntervalError::NotANumber)
        } else {
            Ok(ExtendedFloat(value + 0.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl Eq for ExtendedFloat {}

impl Ord for ExtendedFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.partial_cmp(&other.0).expect("ExtendedFloat is never NaN")
    }
}

impl PartialOrd for ExtendedFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<ExtendedFloat> for f64 {
    fn from(x: ExtendedFloat) -> f64 {
        x.0
    }
}

impl fmt::Display for ExtendedFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::text::write_bound(f, self.0)
    }
}

/// An exact extended real: a rational number, or one of the two infinities.
///
/// The derived ordering puts `NegInf` below every rational and `PosInf`
/// above every rational.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExactReal {
    NegInf,
    Finite(BigRational),
    PosInf,
}

impl ExactReal {
    /// The exact value of a binary64 number. `None` for NaN.
    pub fn from_f64(x: f64) -> Option<ExactReal> {
        if x.is_nan() {
            None
        } else if x == f64::INFINITY {
            Some(ExactReal::PosInf)
        } else if x == f64::NEG_INFINITY {
            Some(ExactReal::NegInf)
        } else {
            BigRational::from_float(x).map(ExactReal::Finite)
        }
    }

    pub fn rational(r: BigRational) -> ExactReal {
        ExactReal::Finite(r)
    }
}

impl From<BigRational> for ExactReal {
    fn from(r: BigRational) -> Self {
        ExactReal::Finite(r)
    }
}

/// `f <= r` for a non-NaN float and an exact rational.
fn float_le(f: f64, r: &BigRational) -> bool {
    if f == f64::NEG_INFINITY {
        true
    } else if f == f64::INFINITY {
        false
    } else {
        BigRational::from_float(f).expect("finite float") <= *r
    }
}

fn float_ge(f: f64, r: &BigRational) -> bool {
    if f == f64::INFINITY {
        true
    } else if f == f64::NEG_INFINITY {
        false
    } else {
        BigRational::from_float(f).expect("finite float") >= *r
    }
}

fn nearest_guess(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    r.to_f64().filter(|v| !v.is_nan()).unwrap_or(0.0)
}

/// The greatest floating-point number not greater than `x`.
pub fn round_down(x: &ExactReal) -> ExtendedFloat {
    match x {
        ExactReal::NegInf => ExtendedFloat::NEG_INFINITY,
        ExactReal::PosInf => ExtendedFloat::INFINITY,
        ExactReal::Finite(r) => {
            let mut f = nearest_guess(r);
            while !float_le(f, r) {
                f = f.next_down();
            }
            loop {
                let next = f.next_up();
                if next.is_finite() && float_le(next, r) {
                    f = next;
                } else {
                    break;
                }
            }
            ExtendedFloat(f + 0.0)
        }
    }
}

/// The least floating-point number not less than `x`.
pub fn round_up(x: &ExactReal) -> ExtendedFloat {
    match x {
        ExactReal::NegInf => ExtendedFloat::NEG_INFINITY,
        ExactReal::PosInf => ExtendedFloat::INFINITY,
        ExactReal::Finite(r) => {
            let mut f = nearest_guess(r);
            while !float_ge(f, r) {
                f = f.next_up();
            }
            loop {
                let next = f.next_down();
                if next.is_finite() && float_ge(next, r) {
                    f = next;
                } else {
                    break;
                }
            }
            ExtendedFloat(f + 0.0)
        }
    }
}

/// Outward-rounded single operations on binary64 operands.
///
/// Every `*_down` result is `<=` the exact result and every `*_up` result is
/// `>=` it. Results that overflow clamp to the largest finite value on the
/// inner side and to the infinity on the outer side.
pub mod directed {
    use std::cmp::Ordering;

    // Below this magnitude an fma residual may underflow and lose its sign.
    const TINY: f64 = 1e-289;

    /// Pair of (down, up) roundings of an exact value whose round-to-nearest
    /// image is `approx` and for which `exact - approx` has sign `err`.
    fn bracket(approx: f64, err: Ordering) -> (f64, f64) {
        if approx == f64::INFINITY {
            return (f64::MAX, f64::INFINITY);
        }
        if approx == f64::NEG_INFINITY {
            return (f64::NEG_INFINITY, -f64::MAX);
        }
        match err {
            Ordering::Equal => (approx, approx),
            Ordering::Greater => (approx, approx.next_up()),
            Ordering::Less => (approx.next_down(), approx),
        }
    }

    fn conservative(approx: f64) -> (f64, f64) {
        (approx.next_down(), approx.next_up())
    }

    fn sign_of(x: f64) -> Ordering {
        x.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    }

    fn add_pair(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        if !s.is_finite() {
            return bracket(s, Ordering::Equal);
        }
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        bracket(s, sign_of(err))
    }

    fn mul_pair(a: f64, b: f64) -> (f64, f64) {
        if a == 0.0 || b == 0.0 {
            return (0.0, 0.0);
        }
        let p = a * b;
        if !p.is_finite() {
            return bracket(p, Ordering::Equal);
        }
        if p.abs() < TINY {
            return conservative(p);
        }
        let err = a.mul_add(b, -p);
        bracket(p, sign_of(err))
    }

    fn div_pair(a: f64, b: f64) -> (f64, f64) {
        if a == 0.0 {
            return (0.0, 0.0);
        }
        let q = a / b;
        if !q.is_finite() {
            return bracket(q, Ordering::Equal);
        }
        if q.abs() < TINY || a.abs() < TINY {
            return conservative(q);
        }
        // exact a/b - q has the sign of (a - q*b) / b
        let rem = (-q).mul_add(b, a);
        let err = if b > 0.0 { sign_of(rem) } else { sign_of(rem).reverse() };
        bracket(q, err)
    }

    fn sqrt_pair(a: f64) -> (f64, f64) {
        if a == 0.0 || a == f64::INFINITY {
            return (a, a);
        }
        let s = a.sqrt();
        if a < TINY {
            let (lo, hi) = conservative(s);
            return (lo.max(0.0), hi);
        }
        let err = (-s).mul_add(s, a);
        bracket(s, sign_of(err))
    }

    pub fn add_down(a: f64, b: f64) -> f64 {
        add_pair(a, b).0 + 0.0
    }

    pub fn add_up(a: f64, b: f64) -> f64 {
        add_pair(a, b).1 + 0.0
    }

    pub fn sub_down(a: f64, b: f64) -> f64 {
        add_pair(a, -b).0 + 0.0
    }

    pub fn sub_up(a: f64, b: f64) -> f64 {
        add_pair(a, -b).1 + 0.0
    }

    pub fn mul_down(a: f64, b: f64) -> f64 {
        mul_pair(a, b).0 + 0.0
    }

    pub fn mul_up(a: f64, b: f64) -> f64 {
        mul_pair(a, b).1 + 0.0
    }

    /// Requires `b != 0`.
    pub fn div_down(a: f64, b: f64) -> f64 {
        div_pair(a, b).0 + 0.0
    }

    /// Requires `b != 0`.
    pub fn div_up(a: f64, b: f64) -> f64 {
        div_pair(a, b).1 + 0.0
    }

    /// Requires `a >= 0`.
    pub fn sqrt_down(a: f64) -> f64 {
        sqrt_pair(a).0 + 0.0
    }

    /// Requires `a >= 0`.
    pub fn sqrt_up(a: f64) -> f64 {
        sqrt_pair(a).1 + 0.0
    }
}
