//! Textual interval syntax: `[lo,hi]` or `empty`.
//!
//! Bounds are decimal literals (optionally with an exponent) or `inf` /
//! `-inf`. Parsing is exact: each literal is read as a rational and then
//! rounded outward, the lower bound down and the upper bound up.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{hull_bounds, ExactReal, Interval, IntervalError};

// Decimal exponents beyond this are far outside binary64 range anyway.
const MAX_EXPONENT: i64 = 5000;

/// Reads an unsigned-or-signed decimal literal such as `-12.5e-3` exactly.
pub fn parse_decimal(text: &str) -> Result<BigRational, IntervalError> {
    let err = || IntervalError::Syntax(format!("not a decimal literal: `{text}`"));
    let s = text.trim();
    let (negative, s) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let mut exp: i64 = match exponent {
        Some(e) => {
            let digits = e.strip_prefix(['+', '-']).unwrap_or(e);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            e.parse::<i64>().ok().filter(|v| v.abs() <= MAX_EXPONENT).ok_or_else(err)?
        }
        None => 0,
    };
    exp -= frac_part.len() as i64;
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().map_err(|_| err())?);
    let ten = BigRational::from_integer(BigInt::from(10));
    let scale = num_traits::pow(ten, exp.unsigned_abs() as usize);
    if exp >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    if negative {
        value = -value;
    }
    Ok(value)
}

fn parse_bound(text: &str) -> Result<ExactReal, IntervalError> {
    match text.trim() {
        "inf" | "+inf" => Ok(ExactReal::PosInf),
        "-inf" => Ok(ExactReal::NegInf),
        other => parse_decimal(other).map(ExactReal::Finite),
    }
}

impl FromStr for Interval {
    type Err = IntervalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "empty" {
            return Ok(Interval::EMPTY);
        }
        let inner = s
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| IntervalError::Syntax(format!("expected `[lo,hi]` or `empty`, got `{s}`")))?;
        let (lo, hi) = inner.split_once(',').ok_or_else(|| IntervalError::Syntax(format!("missing `,` in `{s}`")))?;
        let lo = parse_bound(lo)?;
        let hi = parse_bound(hi)?;
        if lo > hi {
            return Err(IntervalError::Syntax(format!("lower bound exceeds upper bound in `{s}`")));
        }
        Ok(hull_bounds(Some((&lo, &hi))))
    }
}

/// Shortest decimal that reads back as exactly `x`; scientific notation
/// outside `[1e-5, 1e16)`.
pub(crate) fn write_bound(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    if x == f64::INFINITY {
        f.write_str("inf")
    } else if x == f64::NEG_INFINITY {
        f.write_str("-inf")
    } else if x == 0.0 {
        f.write_str("0")
    } else if (1e-5..1e16).contains(&x.abs()) {
        write!(f, "{x}")
    } else {
        write!(f, "{x:e}")
    }
}

/// A single bound in the same notation as interval display.
pub fn format_bound(x: f64) -> String {
    struct Bound(f64);
    impl fmt::Display for Bound {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write_bound(f, self.0)
        }
    }
    Bound(x).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_decimal("0.1").unwrap(), q(1, 10));
        assert_eq!(parse_decimal("-12.5e-3").unwrap(), q(-125, 10000));
        assert_eq!(parse_decimal("3").unwrap(), q(3, 1));
        assert_eq!(parse_decimal(".5").unwrap(), q(1, 2));
        assert_eq!(parse_decimal("2.").unwrap(), q(2, 1));
        assert_eq!(parse_decimal("1E+2").unwrap(), q(100, 1));
        for bad in ["", ".", "1e", "e5", "1.2.3", "abc", "1e99999", "--1", "0x10"] {
            assert!(parse_decimal(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn parse_rounds_outward() {
        let x: Interval = "[0.1,0.1]".parse().unwrap();
        let (lo, hi) = x.bounds().unwrap();
        assert!(lo < hi);
        assert!(x.contains(0.1));
        let y: Interval = "[1, 2]".parse().unwrap();
        assert_eq!(y, Interval::new(1.0, 2.0).unwrap());
    }

    #[test]
    fn parse_special_forms() {
        assert_eq!("empty".parse::<Interval>().unwrap(), Interval::EMPTY);
        assert_eq!("[-inf,inf]".parse::<Interval>().unwrap(), Interval::ENTIRE);
        assert_eq!("[inf,inf]".parse::<Interval>().unwrap(), Interval::EMPTY);
        assert_eq!("[-inf,3]".parse::<Interval>().unwrap(), Interval::new(f64::NEG_INFINITY, 3.0).unwrap());
        assert!("[2,1]".parse::<Interval>().is_err());
        assert!("[1 2]".parse::<Interval>().is_err());
        assert!("1,2".parse::<Interval>().is_err());
        assert!("[nan,1]".parse::<Interval>().is_err());
    }

    #[test]
    fn huge_literals_clamp_outward() {
        let x: Interval = "[1e400,1e400]".parse().unwrap();
        assert_eq!(x.bounds(), Some((f64::MAX, f64::INFINITY)));
    }

    #[test]
    fn display_forms() {
        assert_eq!(Interval::new(-1.0, 1.0).unwrap().to_string(), "[-1,1]");
        assert_eq!(Interval::EMPTY.to_string(), "empty");
        assert_eq!(Interval::ENTIRE.to_string(), "[-inf,inf]");
        assert_eq!(Interval::new(0.5, 1e300).unwrap().to_string(), "[0.5,1e300]");
        assert_eq!(Interval::new(1e-7, 0.1).unwrap().to_string(), "[1e-7,0.1]");
        assert_eq!(format_bound(-0.0), "0");
        assert_eq!(format_bound(2.5e-300), "2.5e-300");
    }

    proptest::proptest! {
        #[test]
        fn printed_bounds_reparse_outward(a in proptest::num::f64::ANY, b in proptest::num::f64::ANY) {
            proptest::prop_assume!(!a.is_nan() && !b.is_nan());
            let x = Interval::new(a.min(b), a.max(b)).unwrap();
            let back: Interval = x.to_string().parse().unwrap();
            proptest::prop_assert!(x.is_subset(&back), "{x} -> {back}");
            proptest::prop_assume!(!x.is_empty());
            let (lo, hi) = (x.lo().unwrap(), x.hi().unwrap());
            let (blo, bhi) = (back.lo().unwrap(), back.hi().unwrap());
            proptest::prop_assert!(blo == lo || blo == lo.next_down());
            proptest::prop_assert!(bhi == hi || bhi == hi.next_up());
        }
    }
}
