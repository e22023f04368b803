//! Interval operations as hulls of relational images.
//!
//! Each operation returns `□{z | ∃x ∈ X, y ∈ Y. R(x, y, z)}` for its defining
//! relation `R`. The closed forms below are read off the relation case by
//! case; infinite bounds are never used as operands of real arithmetic, only
//! as markers that a side of the image is unbounded.

use super::directed::{add_down, add_up, div_down, div_up, mul_down, mul_up, sqrt_down, sqrt_up, sub_down, sub_up};
use super::Interval;

const NEG_INF: f64 = f64::NEG_INFINITY;
const INF: f64 = f64::INFINITY;

/// Sign class of a non-empty interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sign {
    /// `[0,0]`
    Zero,
    /// `lo >= 0`, `hi > 0`
    Pos,
    /// `lo < 0`, `hi <= 0`
    Neg,
    /// `lo < 0 < hi`
    Mixed,
}

fn sign(lo: f64, hi: f64) -> Sign {
    if lo == 0.0 && hi == 0.0 {
        Sign::Zero
    } else if lo >= 0.0 {
        Sign::Pos
    } else if hi <= 0.0 {
        Sign::Neg
    } else {
        Sign::Mixed
    }
}

fn both(x: Interval, y: Interval) -> Option<((f64, f64), (f64, f64))> {
    Some((x.bounds()?, y.bounds()?))
}

/// `{x + y}`. A side is unbounded as soon as either operand is.
pub fn add(x: Interval, y: Interval) -> Interval {
    let Some(((a, b), (c, d))) = both(x, y) else {
        return Interval::EMPTY;
    };
    let lo = if a == NEG_INF || c == NEG_INF { NEG_INF } else { add_down(a, c) };
    let hi = if b == INF || d == INF { INF } else { add_up(b, d) };
    Interval::from_raw(lo, hi)
}

/// `{z | z + y = x}`, that is `{x − y}`.
pub fn sub(x: Interval, y: Interval) -> Interval {
    let Some(((a, b), (c, d))) = both(x, y) else {
        return Interval::EMPTY;
    };
    let lo = if a == NEG_INF || d == INF { NEG_INF } else { sub_down(a, d) };
    let hi = if b == INF || c == NEG_INF { INF } else { sub_up(b, c) };
    Interval::from_raw(lo, hi)
}

// Products appearing in the tables below only pair an infinite bound with a
// non-zero bound, so the sign of an infinite product is always determined.
fn prod_down(a: f64, b: f64) -> f64 {
    if a.is_infinite() || b.is_infinite() {
        debug_assert!(a != 0.0 && b != 0.0);
        if (a > 0.0) == (b > 0.0) {
            INF
        } else {
            NEG_INF
        }
    } else {
        mul_down(a, b)
    }
}

fn prod_up(a: f64, b: f64) -> f64 {
    if a.is_infinite() || b.is_infinite() {
        debug_assert!(a != 0.0 && b != 0.0);
        if (a > 0.0) == (b > 0.0) {
            INF
        } else {
            NEG_INF
        }
    } else {
        mul_up(a, b)
    }
}

/// `{x · y}`.
///
/// If either operand is `[0,0]` every product is `0`, whatever the other
/// operand is, so `[0,0] · ℝ = [0,0]` falls out of the set view without a
/// convention for `0·∞`.
pub fn mul(x: Interval, y: Interval) -> Interval {
    let Some(((a, b), (c, d))) = both(x, y) else {
        return Interval::EMPTY;
    };
    use Sign::*;
    let (lo, hi) = match (sign(a, b), sign(c, d)) {
        (Zero, _) | (_, Zero) => (0.0, 0.0),
        (Pos, Pos) => (prod_down(a, c), prod_up(b, d)),
        (Pos, Neg) => (prod_down(b, c), prod_up(a, d)),
        (Pos, Mixed) => (prod_down(b, c), prod_up(b, d)),
        (Neg, Pos) => (prod_down(a, d), prod_up(b, c)),
        (Neg, Neg) => (prod_down(b, d), prod_up(a, c)),
        (Neg, Mixed) => (prod_down(a, d), prod_up(a, c)),
        (Mixed, Pos) => (prod_down(a, d), prod_up(b, d)),
        (Mixed, Neg) => (prod_down(b, c), prod_up(a, c)),
        (Mixed, Mixed) => (prod_down(a, d).min(prod_down(b, c)), prod_up(a, c).max(prod_up(b, d))),
    };
    Interval::from_raw(lo, hi)
}

// Quotient bounds: an infinite numerator gives an infinite quotient (the
// divisor is non-zero in every call), an infinite divisor gives the limit 0.
fn quot_down(a: f64, b: f64) -> f64 {
    debug_assert!(b != 0.0);
    if a.is_infinite() {
        if (a > 0.0) == (b > 0.0) {
            INF
        } else {
            NEG_INF
        }
    } else if b.is_infinite() {
        0.0
    } else {
        div_down(a, b)
    }
}

fn quot_up(a: f64, b: f64) -> f64 {
    debug_assert!(b != 0.0);
    if a.is_infinite() {
        if (a > 0.0) == (b > 0.0) {
            INF
        } else {
            NEG_INF
        }
    } else if b.is_infinite() {
        0.0
    } else {
        div_up(a, b)
    }
}

/// `□{x / y | x ∈ X, y ∈ Y, y ≠ 0}` for non-empty `X`, `Y`.
fn quotient_image((a, b): (f64, f64), (c, d): (f64, f64)) -> Interval {
    use Sign::*;
    let sx = sign(a, b);
    if c > 0.0 || d < 0.0 {
        // 0 ∉ Y: the image of a continuous map on a connected set.
        let (lo, hi) = match (sx, c > 0.0) {
            (Zero, _) => (0.0, 0.0),
            (Pos, true) => (quot_down(a, d), quot_up(b, c)),
            (Neg, true) => (quot_down(a, c), quot_up(b, d)),
            (Mixed, true) => (quot_down(a, c), quot_up(b, c)),
            (Pos, false) => (quot_down(b, d), quot_up(a, c)),
            (Neg, false) => (quot_down(b, c), quot_up(a, d)),
            (Mixed, false) => (quot_down(b, d), quot_up(a, d)),
        };
        return Interval::from_raw(lo, hi);
    }
    // 0 ∈ Y from here on.
    let sy = sign(c, d);
    match (sx, sy) {
        // Y = {0}: no admissible divisor.
        (_, Zero) => Interval::EMPTY,
        (Zero, _) => Interval::ZERO,
        // Numerators of both signs, or divisors of both signs, approaching
        // 0 send the quotient to both infinities.
        (Mixed, _) | (_, Mixed) => Interval::ENTIRE,
        // Y = [0, d], d > 0: y ranges over (0, d].
        (Pos, Pos) => Interval::from_raw(quot_down(a, d), INF),
        (Neg, Pos) => Interval::from_raw(NEG_INF, quot_up(b, d)),
        // Y = [c, 0], c < 0: y ranges over [c, 0).
        (Pos, Neg) => Interval::from_raw(NEG_INF, quot_up(a, c)),
        (Neg, Neg) => Interval::from_raw(quot_down(b, c), INF),
    }
}

/// Relational division `□{z | ∃x ∈ X, y ∈ Y. z·y = x}`.
///
/// Case table by witness:
/// * `0 ∈ X` and `0 ∈ Y`: the witness `x = 0, y = 0` admits every `z`, so
///   the result is `[−∞, +∞]`.
/// * `Y = {0}`, `0 ∉ X`: `z·0 = x` forces `x = 0`, so no witness exists.
/// * otherwise every witness has `y ≠ 0` and `z = x / y`, which is the
///   quotient image: a bounded interval when `0 ∉ Y`, a ray or the whole
///   line (the hull of two rays) when `0 ∈ Y`.
pub fn div_rel(x: Interval, y: Interval) -> Interval {
    let Some((xb, yb)) = both(x, y) else {
        return Interval::EMPTY;
    };
    if x.contains_zero() && y.contains_zero() {
        return Interval::ENTIRE;
    }
    quotient_image(xb, yb)
}

/// Canonical division `□{x / y | x ∈ X, y ∈ Y, y ≠ 0}`, the set extension
/// of the point quotient that excludes division by zero.
pub fn div_canonical(x: Interval, y: Interval) -> Interval {
    let Some((xb, yb)) = both(x, y) else {
        return Interval::EMPTY;
    };
    quotient_image(xb, yb)
}

/// Relational square root `□{y | ∃x ∈ X. y² = x}`; includes both roots.
///
/// With `X ∩ [0, ∞) = [p, q]` the preimage is `[−√q, −√p] ∪ [√p, √q]`,
/// whose hull is `[−√q, √q]`.
pub fn sqrt_rel(x: Interval) -> Interval {
    match x.bounds() {
        Some((_, hi)) if hi >= 0.0 => {
            let r = sqrt_up(hi);
            Interval::from_raw(-r, r)
        }
        _ => Interval::EMPTY,
    }
}

/// Canonical square root `□{√x | x ∈ X, x ≥ 0}` with the non-negative root.
pub fn sqrt_canonical(x: Interval) -> Interval {
    match x.bounds() {
        Some((lo, hi)) if hi >= 0.0 => Interval::from_raw(sqrt_down(lo.max(0.0)), sqrt_up(hi)),
        _ => Interval::EMPTY,
    }
}

pub fn neg(x: Interval) -> Interval {
    match x.bounds() {
        Some((lo, hi)) => Interval::from_raw(-hi, -lo),
        None => Interval::EMPTY,
    }
}

pub fn abs(x: Interval) -> Interval {
    match x.bounds() {
        None => Interval::EMPTY,
        Some((lo, hi)) if lo >= 0.0 => Interval::from_raw(lo, hi),
        Some((lo, hi)) if hi <= 0.0 => Interval::from_raw(-hi, -lo),
        Some((lo, hi)) => Interval::from_raw(0.0, (-lo).max(hi)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    const E: Interval = Interval::EMPTY;

    #[test]
    fn add_cases() {
        assert_eq!(add(iv(1.0, 2.0), iv(3.0, 4.0)), iv(4.0, 6.0));
        assert_eq!(add(iv(0.0, INF), iv(NEG_INF, 0.0)), Interval::ENTIRE);
        assert_eq!(add(iv(1.0, 2.0), E), E);
        assert_eq!(add(iv(0.1, 0.1), iv(0.2, 0.2)), iv(0.3, 0.30000000000000004));
    }

    #[test]
    fn add_inexact_rounds_outward() {
        let r = add(iv(0.1, 0.1), iv(0.7, 0.7));
        let (lo, hi) = r.bounds().unwrap();
        assert_eq!(lo.next_up(), hi);
    }

    #[test]
    fn sub_cases() {
        assert_eq!(sub(iv(4.0, 6.0), iv(1.0, 2.0)), iv(2.0, 5.0));
        assert_eq!(sub(iv(0.0, 1.0), iv(0.0, 1.0)), iv(-1.0, 1.0));
        assert_eq!(sub(E, iv(0.0, 1.0)), E);
        assert_eq!(sub(iv(0.0, 1.0), iv(0.0, INF)), iv(NEG_INF, 1.0));
    }

    #[test]
    fn mul_cases() {
        assert_eq!(mul(iv(-1.0, 2.0), iv(3.0, 4.0)), iv(-4.0, 8.0));
        assert_eq!(mul(iv(0.0, 0.0), Interval::ENTIRE), iv(0.0, 0.0));
        assert_eq!(mul(iv(2.0, 3.0), E), E);
        assert_eq!(mul(iv(0.0, 1.0), iv(1.0, INF)), iv(0.0, INF));
        assert_eq!(mul(iv(-2.0, 3.0), iv(-5.0, 7.0)), iv(-15.0, 21.0));
        assert_eq!(mul(iv(-2.0, -1.0), iv(NEG_INF, -3.0)), iv(3.0, INF));
        assert_eq!(mul(iv(-1.0, 1.0), iv(0.0, INF)), Interval::ENTIRE);
    }

    #[test]
    fn div_rel_cases() {
        assert_eq!(div_rel(iv(1.0, 2.0), iv(1.0, 2.0)), iv(0.5, 2.0));
        assert_eq!(div_rel(iv(1.0, 2.0), iv(-1.0, 1.0)), Interval::ENTIRE);
        assert_eq!(div_rel(iv(1.0, 2.0), iv(0.0, 0.0)), E);
        assert_eq!(div_rel(iv(0.0, 1.0), iv(0.0, 0.0)), Interval::ENTIRE);
        assert_eq!(div_rel(iv(1.0, 2.0), iv(0.0, 4.0)), iv(0.25, INF));
        assert_eq!(div_rel(iv(-2.0, -1.0), iv(0.0, 4.0)), iv(NEG_INF, -0.25));
        assert_eq!(div_rel(iv(1.0, 2.0), iv(-4.0, 0.0)), iv(NEG_INF, -0.25));
        assert_eq!(div_rel(iv(-2.0, -1.0), iv(-4.0, 0.0)), iv(0.25, INF));
        assert_eq!(div_rel(iv(1.0, 2.0), iv(1.0, INF)), iv(0.0, 2.0));
        assert_eq!(div_rel(iv(0.0, 0.0), iv(1.0, 2.0)), iv(0.0, 0.0));
        assert_eq!(div_rel(E, iv(1.0, 2.0)), E);
        assert_eq!(div_rel(iv(1.0, 2.0), E), E);
    }

    #[test]
    fn div_canonical_cases() {
        assert_eq!(div_canonical(iv(0.0, 1.0), iv(0.0, 0.0)), E);
        assert_eq!(div_canonical(iv(0.0, 0.0), iv(-1.0, 1.0)), iv(0.0, 0.0));
        assert_eq!(div_canonical(iv(0.0, 2.0), iv(0.0, 1.0)), iv(0.0, INF));
        assert_eq!(div_canonical(iv(-1.0, 2.0), iv(0.0, 1.0)), Interval::ENTIRE);
        assert_eq!(div_canonical(iv(1.0, 2.0), iv(1.0, 2.0)), iv(0.5, 2.0));
    }

    #[test]
    fn div_inexact_quotient_rounds_outward() {
        let r = div_rel(iv(1.0, 1.0), iv(3.0, 3.0));
        let (lo, hi) = r.bounds().unwrap();
        assert!(lo < 1.0 / 3.0 || hi > 1.0 / 3.0);
        assert_eq!(lo.next_up(), hi);
    }

    #[test]
    fn sqrt_cases() {
        assert_eq!(sqrt_rel(iv(4.0, 9.0)), iv(-3.0, 3.0));
        assert_eq!(sqrt_rel(iv(-2.0, -1.0)), E);
        assert_eq!(sqrt_rel(iv(0.0, 0.0)), iv(0.0, 0.0));
        assert_eq!(sqrt_rel(iv(-1.0, INF)), Interval::ENTIRE);
        assert_eq!(sqrt_canonical(iv(4.0, 9.0)), iv(2.0, 3.0));
        assert_eq!(sqrt_canonical(iv(-4.0, 9.0)), iv(0.0, 3.0));
        assert_eq!(sqrt_canonical(iv(-2.0, -1.0)), E);
        assert_eq!(sqrt_canonical(iv(1.0, INF)), iv(1.0, INF));
    }

    #[test]
    fn neg_abs_cases() {
        assert_eq!(neg(iv(1.0, 2.0)), iv(-2.0, -1.0));
        assert_eq!(neg(E), E);
        assert_eq!(neg(iv(NEG_INF, 3.0)), iv(-3.0, INF));
        assert_eq!(abs(iv(-3.0, 2.0)), iv(0.0, 3.0));
        assert_eq!(abs(iv(-3.0, -2.0)), iv(2.0, 3.0));
        assert_eq!(abs(iv(NEG_INF, 1.0)), iv(0.0, INF));
        assert_eq!(abs(E), E);
    }
}
