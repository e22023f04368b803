//! Randomized inclusion checks and test-case generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::OracleError;
use crate::expr::{BinaryOp, Expr, UnaryOp};
use crate::interval::{Interval, IntervalBox};
use crate::semantics::{Compiled, Interpretation, RealResult};

/// A point where the real function is defined but its value escapes the
/// interval evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InclusionReport {
    pub enclosure: Interval,
    pub samples: usize,
    pub defined: usize,
    pub violations: Vec<Violation>,
}

impl InclusionReport {
    pub fn violation_count(&self) -> usize {
        self.violations.len()
    }
}

/// Uniform draw from a bounded non-empty interval. One draw in eight snaps
/// to an endpoint or to zero, where rounding is most likely to go wrong.
pub fn sample_interval(rng: &mut impl Rng, iv: &Interval) -> f64 {
    let (lo, hi) = iv.bounds().expect("non-empty interval");
    if rng.random_ratio(1, 8) {
        return match rng.random_range(0..3) {
            0 => lo,
            1 => hi,
            _ if iv.contains(0.0) => 0.0,
            _ => lo,
        };
    }
    let u: f64 = rng.random();
    (lo * (1.0 - u) + hi * u).clamp(lo, hi)
}

pub fn sample_point(rng: &mut impl Rng, bx: &IntervalBox) -> Vec<f64> {
    bx.dims().iter().map(|iv| sample_interval(rng, iv)).collect()
}

/// Draws `samples` points of `bx` and collects those where the real value
/// is defined but lies outside the interval evaluation on `bx`.
pub fn sample_inclusion(
    compiled: &Compiled,
    interp: &Interpretation,
    bx: &IntervalBox,
    samples: usize,
    seed: u64,
) -> Result<InclusionReport, OracleError> {
    if !bx.is_bounded() {
        return Err(OracleError::Unbounded);
    }
    let enclosure = compiled.eval_interval(interp, bx)?;
    let mut report = InclusionReport { enclosure, samples, defined: 0, violations: Vec::new() };
    if bx.is_empty() {
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let point = sample_point(&mut rng, bx);
        if let RealResult::Defined(value) = compiled.eval_real(interp, &point)? {
            report.defined += 1;
            if !enclosure.contains(value) {
                report.violations.push(Violation { point, value });
            }
        }
    }
    Ok(report)
}

const NAMES: [&str; 4] = ["x", "y", "z", "w"];

/// Shape parameters for [`random_expr`].
#[derive(Clone, Debug)]
pub struct ExprShape {
    pub max_depth: usize,
    pub max_vars: usize,
    pub unary: Vec<UnaryOp>,
    pub binary: Vec<BinaryOp>,
}

impl ExprShape {
    /// Every operation, uniformly weighted.
    pub fn full(max_depth: usize, max_vars: usize) -> ExprShape {
        ExprShape {
            max_depth,
            max_vars: max_vars.clamp(1, NAMES.len()),
            unary: UnaryOp::ALL.to_vec(),
            binary: BinaryOp::ALL.to_vec(),
        }
    }
}

/// Random expression tree of depth at most `shape.max_depth` over the first
/// `shape.max_vars` of `x, y, z, w`.
pub fn random_expr(rng: &mut impl Rng, shape: &ExprShape) -> Expr {
    let vars = &NAMES[..shape.max_vars.clamp(1, NAMES.len())];
    fn go(rng: &mut impl Rng, shape: &ExprShape, vars: &[&str], depth: usize) -> Expr {
        let ops = shape.unary.len() + shape.binary.len();
        if depth == 0 || ops == 0 || rng.random_ratio(1, 4) {
            return Expr::var(vars[rng.random_range(0..vars.len())]);
        }
        let k = rng.random_range(0..ops);
        if k < shape.unary.len() {
            Expr::unary(shape.unary[k], go(rng, shape, vars, depth - 1))
        } else {
            let op = shape.binary[k - shape.unary.len()];
            let l = go(rng, shape, vars, depth - 1);
            let r = go(rng, shape, vars, depth - 1);
            Expr::binary(op, l, r)
        }
    }
    go(rng, shape, vars, shape.max_depth)
}

/// Random expression over `{+, −, *, neg}` in which each of `n` variables
/// occurs exactly once.
pub fn random_single_occurrence(rng: &mut impl Rng, n: usize) -> Expr {
    let names: Vec<String> = (0..n.max(1)).map(|i| format!("v{i}")).collect();
    let mut order: Vec<usize> = (0..names.len()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut nodes: Vec<Expr> = order.iter().map(|&i| maybe_neg(rng, Expr::var(names[i].clone()))).collect();
    while nodes.len() > 1 {
        let i = rng.random_range(0..nodes.len() - 1);
        let r = nodes.remove(i + 1);
        let l = nodes.remove(i);
        let op = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul][rng.random_range(0..3)];
        nodes.insert(i, maybe_neg(rng, Expr::binary(op, l, r)));
    }
    nodes.pop().expect("at least one variable")
}

fn maybe_neg(rng: &mut impl Rng, e: Expr) -> Expr {
    if rng.random_ratio(1, 5) {
        Expr::unary(UnaryOp::Neg, e)
    } else {
        e
    }
}

/// Random endpoint: small integers, dyadic fractions, zero, and arbitrary
/// binary64 values of moderate magnitude.
fn random_endpoint(rng: &mut impl Rng) -> f64 {
    match rng.random_range(0..5) {
        0 => 0.0,
        1 => rng.random_range(-8i32..=8) as f64,
        2 => rng.random_range(-64i32..=64) as f64 / 16.0,
        3 => rng.random_range(-10.0..10.0),
        _ => rng.random_range(-1.0..1.0) * 10f64.powi(rng.random_range(-6..=6)),
    }
}

/// Random bounded interval; one in ten is a single point.
pub fn random_interval(rng: &mut impl Rng) -> Interval {
    let a = random_endpoint(rng);
    if rng.random_ratio(1, 10) {
        return Interval::point(a).expect("finite");
    }
    let b = random_endpoint(rng);
    Interval::new(a.min(b), a.max(b)).expect("ordered finite bounds")
}

pub fn random_box(rng: &mut impl Rng, arity: usize) -> IntervalBox {
    (0..arity).map(|_| random_interval(rng)).collect()
}

/// Random box whose endpoints are multiples of 1/16 in `[−4, 4]`.
pub fn random_dyadic_box(rng: &mut impl Rng, arity: usize) -> IntervalBox {
    (0..arity)
        .map(|_| {
            let a = rng.random_range(-64i32..=64) as f64 / 16.0;
            let b = rng.random_range(-64i32..=64) as f64 / 16.0;
            Interval::new(a.min(b), a.max(b)).expect("ordered finite bounds")
        })
        .collect()
}

/// True when, on `bx`, every divisor's interval excludes zero, every square
/// root's argument is bounded away from zero, and the whole evaluation is
/// bounded. Every operation is then continuous on the box.
pub fn well_conditioned(e: &Expr, interp: &Interpretation, bx: &IntervalBox) -> bool {
    let names = e.variable_sequence();
    let sub_box = |sub: &Expr| -> IntervalBox {
        sub.variable_sequence().names().iter().map(|n| bx[names.position(n).expect("subexpression variable")]).collect()
    };
    let eval = |sub: &Expr| Compiled::new(sub).eval_interval(interp, &sub_box(sub)).ok();
    fn walk(e: &Expr, eval: &dyn Fn(&Expr) -> Option<Interval>) -> bool {
        let ok_here = match e {
            Expr::Binary(BinaryOp::Div, _, r) => eval(r).is_some_and(|y| !y.is_empty() && !y.contains(0.0)),
            Expr::Unary(UnaryOp::Sqrt | UnaryOp::SqrtRel, c) => eval(c).and_then(|x| x.lo()).is_some_and(|lo| lo > 0.0),
            _ => true,
        };
        ok_here
            && match e {
                Expr::Var(_) => true,
                Expr::Unary(_, c) => walk(c, eval),
                Expr::Binary(_, l, r) => walk(l, eval) && walk(r, eval),
            }
    }
    walk(e, &eval) && eval(e).is_some_and(|y| !y.is_empty() && y.is_bounded())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn dependency_example_has_no_violations() {
        let c = Compiled::new(&parse("x - x").unwrap().expr);
        let r =
            sample_inclusion(&c, &Interpretation::standard(), &IntervalBox::new(vec![iv(0.0, 1.0)]), 500, 1).unwrap();
        assert_eq!(r.violation_count(), 0);
        assert_eq!(r.enclosure, iv(-1.0, 1.0));
        assert_eq!(r.defined, 500);
    }

    #[test]
    fn partial_function_counts_only_defined_points() {
        let c = Compiled::new(&parse("sqrt(-abs(x))").unwrap().expr);
        let r =
            sample_inclusion(&c, &Interpretation::standard(), &IntervalBox::new(vec![iv(-1.0, 1.0)]), 2000, 3).unwrap();
        assert_eq!(r.violation_count(), 0);
        assert!(r.defined > 0, "zero is drawn by the endpoint bias");
        assert!(r.enclosure.contains(0.0));
    }

    #[test]
    fn unbounded_box_is_rejected() {
        let c = Compiled::new(&parse("x").unwrap().expr);
        let r = sample_inclusion(&c, &Interpretation::standard(), &IntervalBox::new(vec![Interval::ENTIRE]), 10, 0);
        assert_eq!(r.unwrap_err(), OracleError::Unbounded);
    }

    #[test]
    fn sampling_is_deterministic_and_inside() {
        let bx = IntervalBox::new(vec![iv(-1.0, 2.0), iv(3.0, 3.0), iv(-1e300, 1e300)]);
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let p = sample_point(&mut a, &bx);
            assert!(bx.contains(&p));
            assert_eq!(p, sample_point(&mut b, &bx));
        }
    }

    #[test]
    fn generators_respect_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let shape = ExprShape::full(5, 4);
        for _ in 0..500 {
            let e = random_expr(&mut rng, &shape);
            assert!(e.depth() <= 5);
            assert!(e.variable_sequence().len() <= 4);
        }
        for n in 1..6 {
            let e = random_single_occurrence(&mut rng, n);
            assert!(e.occurs_once());
            assert_eq!(e.variable_sequence().len(), n);
        }
        for _ in 0..100 {
            assert!(random_box(&mut rng, 3).is_bounded());
        }
    }

    #[test]
    fn conditioning_filter() {
        let interp = Interpretation::canonical();
        let check = |src: &str, dims: &[(f64, f64)]| {
            let e = parse(src).unwrap().expr;
            let bx: IntervalBox = dims.iter().map(|&(a, b)| iv(a, b)).collect();
            well_conditioned(&e, &interp, &bx)
        };
        assert!(check("x / y", &[(0.0, 1.0), (1.0, 2.0)]));
        assert!(!check("x / y", &[(0.0, 1.0), (-1.0, 2.0)]));
        assert!(!check("sqrt(x)", &[(0.0, 1.0)]));
        assert!(check("sqrt(x) * x", &[(0.5, 1.0)]));
        assert!(!check("x / (y - y)", &[(0.0, 1.0), (1.0, 2.0)]));
    }
}
