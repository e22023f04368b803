//! Exact rational ground truth for interval operations and expressions.
//!
//! Nothing here calls the floating-point interval operations: relations are
//! enumerated on rational grids and expressions are evaluated in exact
//! rational arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::OracleError;
use crate::expr::{BinaryOp, Expr, UnaryOp};
use crate::interval::{ExactReal, Interval, IntervalBox};

/// An interval with exact (possibly infinite) bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RationalInterval {
    Empty,
    Span { lo: ExactReal, hi: ExactReal },
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> RationalInterval {
        assert!(lo <= hi, "inverted rational interval");
        RationalInterval::Span { lo: ExactReal::Finite(lo), hi: ExactReal::Finite(hi) }
    }

    pub fn from_ints(lo: i64, hi: i64) -> RationalInterval {
        RationalInterval::new(BigRational::from_integer(lo.into()), BigRational::from_integer(hi.into()))
    }

    /// Exact value of a floating-point interval.
    pub fn from_interval(iv: &Interval) -> RationalInterval {
        match iv.bounds() {
            None => RationalInterval::Empty,
            Some((lo, hi)) => RationalInterval::Span {
                lo: ExactReal::from_f64(lo).expect("interval bounds are never NaN"),
                hi: ExactReal::from_f64(hi).expect("interval bounds are never NaN"),
            },
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, RationalInterval::Empty)
    }

    pub fn bounds(&self) -> Option<(&ExactReal, &ExactReal)> {
        match self {
            RationalInterval::Empty => None,
            RationalInterval::Span { lo, hi } => Some((lo, hi)),
        }
    }

    fn finite_bounds(&self) -> Result<Option<(&BigRational, &BigRational)>, OracleError> {
        match self {
            RationalInterval::Empty => Ok(None),
            RationalInterval::Span { lo: ExactReal::Finite(a), hi: ExactReal::Finite(b) } => Ok(Some((a, b))),
            _ => Err(OracleError::Unbounded),
        }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        match self {
            RationalInterval::Empty => false,
            RationalInterval::Span { lo, hi } => {
                let x = ExactReal::Finite(x.clone());
                *lo <= x && x <= *hi
            }
        }
    }

    /// `self ⊂ other` as sets of reals.
    pub fn is_subset(&self, other: &RationalInterval) -> bool {
        match (self, other) {
            (RationalInterval::Empty, _) => true,
            (_, RationalInterval::Empty) => false,
            (RationalInterval::Span { lo: a, hi: b }, RationalInterval::Span { lo: c, hi: d }) => c <= a && b <= d,
        }
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn bound(x: &ExactReal) -> String {
            match x {
                ExactReal::NegInf => "-inf".into(),
                ExactReal::PosInf => "inf".into(),
                ExactReal::Finite(r) => r.to_string(),
            }
        }
        match self {
            RationalInterval::Empty => f.write_str("empty"),
            RationalInterval::Span { lo, hi } => write!(f, "[{},{}]", bound(lo), bound(hi)),
        }
    }
}

/// Operations the relational oracle can enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleOp {
    Add,
    Sub,
    Mul,
    /// `z·y = x`
    Div,
    /// `y² = x`; the second operand is ignored.
    SqrtRel,
}

fn grid_points(lo: &BigRational, hi: &BigRational, grid: usize) -> Vec<BigRational> {
    let n = BigRational::from_integer(BigInt::from(grid));
    let step = (hi - lo) / &n;
    (0..=grid).map(|k| lo + &step * BigRational::from_integer(BigInt::from(k))).collect()
}

/// Exact rational square root when `x` is the square of a rational.
fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

struct Hull {
    lo: Option<BigRational>,
    hi: Option<BigRational>,
    below: bool,
    above: bool,
}

impl Hull {
    fn new() -> Hull {
        Hull { lo: None, hi: None, below: false, above: false }
    }

    fn push(&mut self, z: BigRational) {
        if self.lo.as_ref().is_none_or(|l| z < *l) {
            self.lo = Some(z.clone());
        }
        if self.hi.as_ref().is_none_or(|h| z > *h) {
            self.hi = Some(z);
        }
    }

    fn finish(self) -> RationalInterval {
        if self.lo.is_none() && !self.below && !self.above {
            return RationalInterval::Empty;
        }
        let lo = match (self.below, self.lo.clone()) {
            (true, _) | (false, None) => ExactReal::NegInf,
            (false, Some(l)) => ExactReal::Finite(l),
        };
        let hi = match (self.above, self.hi) {
            (true, _) | (false, None) => ExactReal::PosInf,
            (false, Some(h)) => ExactReal::Finite(h),
        };
        RationalInterval::Span { lo, hi }
    }
}

/// Enumerates the defining relation of `op` over bounded rational operands.
///
/// `+`, `−` and `*` are bilinear, so their endpoint combinations give the
/// exact hull. `/` enumerates witness pairs on a `grid × grid` lattice (plus
/// `0` when it is a member) and adds the symbolic cases: `x = 0, y = 0`
/// admits every `z`, and `y → 0` with `x ≠ 0` sends `z` to the infinity of
/// sign `sign(x)·sign(y)`. `sqrt` tests `y² ∈ X` on a grid over
/// `[−R, R]`, `R = max(1, hi)`, plus exact rational roots of the endpoints.
pub fn relational_oracle(
    op: OracleOp,
    x: &RationalInterval,
    y: &RationalInterval,
    grid: usize,
) -> Result<RationalInterval, OracleError> {
    if grid < 2 {
        return Err(OracleError::Grid(grid));
    }
    let Some((a, b)) = x.finite_bounds()? else {
        return Ok(RationalInterval::Empty);
    };
    if op == OracleOp::SqrtRel {
        return Ok(sqrt_oracle(a, b, grid));
    }
    let Some((c, d)) = y.finite_bounds()? else {
        return Ok(RationalInterval::Empty);
    };
    let mut hull = Hull::new();
    match op {
        OracleOp::Add | OracleOp::Sub | OracleOp::Mul => {
            for xv in [a, b] {
                for yv in [c, d] {
                    hull.push(match op {
                        OracleOp::Add => xv + yv,
                        OracleOp::Sub => xv - yv,
                        _ => xv * yv,
                    });
                }
            }
        }
        OracleOp::Div => {
            let zero = BigRational::zero();
            let mut xs = grid_points(a, b, grid);
            let mut ys = grid_points(c, d, grid);
            if *a <= zero && zero <= *b {
                xs.push(zero.clone());
            }
            let y_has_zero = *c <= zero && zero <= *d;
            if y_has_zero {
                ys.push(zero.clone());
            }
            for xv in &xs {
                for yv in &ys {
                    if yv.is_zero() {
                        if xv.is_zero() {
                            hull.below = true;
                            hull.above = true;
                        }
                    } else {
                        hull.push(xv / yv);
                    }
                }
            }
            if y_has_zero {
                for xv in xs.iter().filter(|v| !v.is_zero()) {
                    let pos = xv.is_positive();
                    // y → 0⁺ is available iff d > 0, y → 0⁻ iff c < 0
                    if *d > zero {
                        if pos {
                            hull.above = true
                        } else {
                            hull.below = true
                        }
                    }
                    if *c < zero {
                        if pos {
                            hull.below = true
                        } else {
                            hull.above = true
                        }
                    }
                }
            }
        }
        OracleOp::SqrtRel => unreachable!(),
    }
    Ok(hull.finish())
}

fn sqrt_oracle(a: &BigRational, b: &BigRational, grid: usize) -> RationalInterval {
    let zero = BigRational::zero();
    if *b < zero {
        return RationalInterval::Empty;
    }
    let one = BigRational::from_integer(1.into());
    let r = if *b > one { b.clone() } else { one };
    let mut candidates = grid_points(&-r.clone(), &r, grid);
    candidates.push(zero.clone());
    for end in [a, b] {
        if let Some(s) = rational_sqrt(end) {
            candidates.push(-s.clone());
            candidates.push(s);
        }
    }
    let mut hull = Hull::new();
    for yv in candidates {
        let sq = &yv * &yv;
        if *a <= sq && sq <= *b {
            hull.push(yv);
        }
    }
    hull.finish()
}

/// Exact rational evaluation of `e` at `point` (ordered by the variable
/// sequence). Supports `+ − * / neg abs`; `None` where the expression is
/// undefined (division by zero).
pub fn eval_exact(e: &Expr, point: &[BigRational]) -> Result<Option<BigRational>, OracleError> {
    let seq = e.variable_sequence();
    if seq.len() != point.len() {
        return Err(OracleError::Arity { expected: seq.len(), got: point.len() });
    }
    fn go(e: &Expr, env: &dyn Fn(&str) -> BigRational) -> Result<Option<BigRational>, OracleError> {
        Ok(match e {
            Expr::Var(n) => Some(env(n)),
            Expr::Unary(op, c) => {
                let Some(v) = go(c, env)? else { return Ok(None) };
                match op {
                    UnaryOp::Neg => Some(-v),
                    UnaryOp::Abs => Some(v.abs()),
                    UnaryOp::Sqrt | UnaryOp::SqrtRel => return Err(OracleError::Unsupported(op.symbol().to_owned())),
                }
            }
            Expr::Binary(op, l, r) => {
                let (Some(l), Some(r)) = (go(l, env)?, go(r, env)?) else {
                    return Ok(None);
                };
                match op {
                    BinaryOp::Add => Some(l + r),
                    BinaryOp::Sub => Some(l - r),
                    BinaryOp::Mul => Some(l * r),
                    BinaryOp::Div if r.is_zero() => None,
                    BinaryOp::Div => Some(l / r),
                }
            }
        })
    }
    let env = |n: &str| point[seq.position(n).expect("variable in sequence")].clone();
    go(e, &env)
}

fn multilinear_ops_only(e: &Expr) -> bool {
    match e {
        Expr::Var(_) => true,
        Expr::Unary(UnaryOp::Neg, c) => multilinear_ops_only(c),
        Expr::Unary(..) => false,
        Expr::Binary(BinaryOp::Div, ..) => false,
        Expr::Binary(_, l, r) => multilinear_ops_only(l) && multilinear_ops_only(r),
    }
}

/// Exact range of a single-occurrence expression over `{+, −, *, neg}`.
///
/// Such an expression is affine in each variable separately, so its extrema
/// over a box are attained at corners; the hull over all `2ⁿ` corners,
/// evaluated exactly, is the range.
pub fn corner_range_oracle(e: &Expr, bx: &IntervalBox) -> Result<RationalInterval, OracleError> {
    if !e.occurs_once() || !multilinear_ops_only(e) {
        return Err(OracleError::Precondition(
            "corner oracle needs a single-occurrence expression over + - * neg".into(),
        ));
    }
    if !bx.is_bounded() {
        return Err(OracleError::Unbounded);
    }
    if bx.arity() != e.variable_sequence().len() {
        return Err(OracleError::Arity { expected: e.variable_sequence().len(), got: bx.arity() });
    }
    if bx.is_empty() {
        return Ok(RationalInterval::Empty);
    }
    let ends: Vec<[BigRational; 2]> = bx
        .dims()
        .iter()
        .map(|d| {
            let (lo, hi) = d.bounds().expect("non-empty");
            [BigRational::from_float(lo).expect("finite"), BigRational::from_float(hi).expect("finite")]
        })
        .collect();
    let n = ends.len();
    let mut hull = Hull::new();
    for mask in 0u64..(1u64 << n) {
        let corner: Vec<BigRational> = (0..n).map(|i| ends[i][((mask >> i) & 1) as usize].clone()).collect();
        let v = eval_exact(e, &corner)?.expect("no division in multilinear expressions");
        hull.push(v);
    }
    Ok(hull.finish())
}

/// How many floating-point steps `bound` lies outward of the exact bound
/// `exact`, or `None` if it lies inward (fails to contain). Lower bounds
/// step down, upper bounds step up. Stops counting at `cap`.
pub fn outward_steps(bound: f64, exact: &ExactReal, lower: bool, cap: u32) -> Option<u32> {
    let as_exact = ExactReal::from_f64(bound)?;
    if (lower && as_exact > *exact) || (!lower && as_exact < *exact) {
        return None;
    }
    let mut f = bound;
    let mut steps = 0;
    loop {
        let next = if lower { f.next_up() } else { f.next_down() };
        let Some(next_exact) = ExactReal::from_f64(next) else { return Some(steps) };
        let beyond = if lower { next_exact > *exact } else { next_exact < *exact };
        if beyond || f.is_infinite() && next.is_infinite() || steps >= cap {
            return Some(steps);
        }
        f = next;
        steps += 1;
    }
}
