//! The function computed by an expression under an interpretation.
//!
//! A variable computes the identity, a unary node composes its operation with
//! the child's function, and a binary node `e₁ ⋄ e₂` computes
//! `⋄ ∘ (f₁ × f₂) ∘ δ` where `δ` is the [`DistributionPlan`] routing the
//! combined argument tuple to the two children. Plans are compiled once per
//! node into a [`Compiled`] tree; evaluation is then a fold that slices the
//! incoming tuple with each plan.
//!
//! The same tree is evaluated over two domains: binary64 reals, where
//! operations are partial and an undefined subterm poisons the result, and
//! intervals, where every operation is total.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::expr::{BinaryOp, Expr, Parsed, UnaryOp, VariableSequence};
use crate::interval::{self, Interval, IntervalBox};

/// Value of a real partial function at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RealResult {
    Defined(f64),
    Undefined,
}

impl RealResult {
    /// `Defined` only for finite values; NaN and overflow are outside the
    /// reals and become `Undefined`.
    pub fn from_f64(v: f64) -> RealResult {
        if v.is_finite() {
            RealResult::Defined(v + 0.0)
        } else {
            RealResult::Undefined
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            RealResult::Defined(v) => Some(v),
            RealResult::Undefined => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, RealResult::Defined(_))
    }
}

impl fmt::Display for RealResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealResult::Defined(v) => write!(f, "{v}"),
            RealResult::Undefined => f.write_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("interpretation has no binding for `{0}`")]
    MissingSymbol(String),
}

/// Index-level form of the distribution function for a pair `(e₁, e₂)`.
///
/// The combined tuple is `e₁`'s variables followed by the variables of `e₂`
/// that do not occur in `e₁`. `left` is always the prefix `0..m`; `right`
/// gives, for each variable of `e₂` in `e₂`'s own order, its position in the
/// combined tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionPlan {
    combined_arity: usize,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl DistributionPlan {
    pub fn combined_arity(&self) -> usize {
        self.combined_arity
    }

    pub fn left_indices(&self) -> &[usize] {
        &self.left
    }

    pub fn right_indices(&self) -> &[usize] {
        &self.right
    }

    /// Splits a combined tuple into the argument tuples of the two children.
    pub fn apply<T: Clone>(&self, tuple: &[T]) -> (Vec<T>, Vec<T>) {
        assert_eq!(tuple.len(), self.combined_arity, "tuple does not match plan");
        let left = tuple[..self.left.len()].to_vec();
        let right = self.right.iter().map(|&i| tuple[i].clone()).collect();
        (left, right)
    }

    fn from_sequences(left: &VariableSequence, right: &VariableSequence) -> DistributionPlan {
        let m = left.len();
        let mut next = m;
        let right_idx = right
            .names()
            .iter()
            .map(|w| {
                left.position(w).unwrap_or_else(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        DistributionPlan { combined_arity: next, left: (0..m).collect(), right: right_idx }
    }
}

/// Builds the distribution plan for `e1 ⋄ e2`.
pub fn build_distribution(e1: &Expr, e2: &Expr) -> DistributionPlan {
    DistributionPlan::from_sequences(&e1.variable_sequence(), &e2.variable_sequence())
}

/// Selects how `/` and `sqrt` are extended to intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Hulls of the defining relations `z·y = x` and `y² = x`.
    Relational,
    /// Hulls of the pointwise images of the real partial functions.
    Canonical,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "relational" => Ok(Mode::Relational),
            "canonical" => Ok(Mode::Canonical),
            other => Err(format!("unknown mode `{other}` (expected relational or canonical)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Relational => "relational",
            Mode::Canonical => "canonical",
        })
    }
}

pub type UnaryExtension = fn(Interval) -> Interval;
pub type BinaryExtension = fn(Interval, Interval) -> Interval;

/// A real partial function paired with an interval set extension of it.
#[derive(Clone, Copy)]
pub struct UnaryEntry {
    pub real: fn(f64) -> RealResult,
    pub interval: UnaryExtension,
}

#[derive(Clone, Copy)]
pub struct BinaryEntry {
    pub real: fn(f64, f64) -> RealResult,
    pub interval: BinaryExtension,
}

fn real_neg(x: f64) -> RealResult {
    RealResult::from_f64(-x)
}

fn real_abs(x: f64) -> RealResult {
    RealResult::from_f64(x.abs())
}

fn real_sqrt(x: f64) -> RealResult {
    if x >= 0.0 {
        RealResult::from_f64(x.sqrt())
    } else {
        RealResult::Undefined
    }
}

fn real_add(x: f64, y: f64) -> RealResult {
    RealResult::from_f64(x + y)
}

fn real_sub(x: f64, y: f64) -> RealResult {
    RealResult::from_f64(x - y)
}

fn real_mul(x: f64, y: f64) -> RealResult {
    RealResult::from_f64(x * y)
}

fn real_div(x: f64, y: f64) -> RealResult {
    if y == 0.0 {
        RealResult::Undefined
    } else {
        RealResult::from_f64(x / y)
    }
}

/// Symbol table mapping each operation symbol to its real function and an
/// interval set extension of that function.
///
/// Both `sqrt` and `sqrtr` denote the non-negative square root over the
/// reals; they differ only in which interval extension they carry.
#[derive(Clone)]
pub struct Interpretation {
    unary: BTreeMap<UnaryOp, UnaryEntry>,
    binary: BTreeMap<BinaryOp, BinaryEntry>,
}

impl fmt::Debug for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Interpretation")
            .field("unary", &self.unary.keys().collect::<Vec<_>>())
            .field("binary", &self.binary.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl Default for Interpretation {
    fn default() -> Self {
        Interpretation::standard()
    }
}

impl Interpretation {
    /// No symbols bound.
    pub fn empty() -> Self {
        Interpretation { unary: BTreeMap::new(), binary: BTreeMap::new() }
    }

    /// Canonical `sqrt`, relational `/`.
    pub fn standard() -> Self {
        let mut i = Interpretation::empty();
        i.bind_unary(UnaryOp::Neg, UnaryEntry { real: real_neg, interval: interval::neg });
        i.bind_unary(UnaryOp::Abs, UnaryEntry { real: real_abs, interval: interval::abs });
        i.bind_unary(UnaryOp::Sqrt, UnaryEntry { real: real_sqrt, interval: interval::sqrt_canonical });
        i.bind_unary(UnaryOp::SqrtRel, UnaryEntry { real: real_sqrt, interval: interval::sqrt_rel });
        i.bind_binary(BinaryOp::Add, BinaryEntry { real: real_add, interval: interval::add });
        i.bind_binary(BinaryOp::Sub, BinaryEntry { real: real_sub, interval: interval::sub });
        i.bind_binary(BinaryOp::Mul, BinaryEntry { real: real_mul, interval: interval::mul });
        i.bind_binary(BinaryOp::Div, BinaryEntry { real: real_div, interval: interval::div_rel });
        i
    }

    pub fn relational() -> Self {
        mode_select(&Interpretation::standard(), Mode::Relational)
    }

    pub fn canonical() -> Self {
        mode_select(&Interpretation::standard(), Mode::Canonical)
    }

    pub fn bind_unary(&mut self, op: UnaryOp, entry: UnaryEntry) {
        self.unary.insert(op, entry);
    }

    pub fn bind_binary(&mut self, op: BinaryOp, entry: BinaryEntry) {
        self.binary.insert(op, entry);
    }

    pub fn unary(&self, op: UnaryOp) -> Option<&UnaryEntry> {
        self.unary.get(&op)
    }

    pub fn binary(&self, op: BinaryOp) -> Option<&BinaryEntry> {
        self.binary.get(&op)
    }

    fn check(&self, e: &Expr) -> Result<(), EvalError> {
        match e {
            Expr::Var(_) => Ok(()),
            Expr::Unary(op, c) => {
                if !self.unary.contains_key(op) {
                    return Err(EvalError::MissingSymbol(op.symbol().to_owned()));
                }
                self.check(c)
            }
            Expr::Binary(op, l, r) => {
                if !self.binary.contains_key(op) {
                    return Err(EvalError::MissingSymbol(op.symbol().to_string()));
                }
                self.check(l)?;
                self.check(r)
            }
        }
    }
}

/// Rebinds `/` and `sqrt` of `base` to the extensions of the given mode.
/// `sqrtr` always keeps its relational extension.
pub fn mode_select(base: &Interpretation, mode: Mode) -> Interpretation {
    let mut out = base.clone();
    let (div, sqrt): (BinaryExtension, UnaryExtension) = match mode {
        Mode::Relational => (interval::div_rel, interval::sqrt_rel),
        Mode::Canonical => (interval::div_canonical, interval::sqrt_canonical),
    };
    out.bind_binary(BinaryOp::Div, BinaryEntry { real: real_div, interval: div });
    out.bind_unary(UnaryOp::Sqrt, UnaryEntry { real: real_sqrt, interval: sqrt });
    out
}

#[derive(Clone, Debug)]
enum Node {
    Var,
    Unary(UnaryOp, Box<Node>),
    Binary { op: BinaryOp, plan: DistributionPlan, left: Box<Node>, right: Box<Node> },
}

impl Node {
    fn compile(e: &Expr) -> (Node, VariableSequence) {
        match e {
            Expr::Var(_) => (Node::Var, e.variable_sequence()),
            Expr::Unary(op, c) => {
                let (child, seq) = Node::compile(c);
                (Node::Unary(*op, Box::new(child)), seq)
            }
            Expr::Binary(op, l, r) => {
                let (left, ls) = Node::compile(l);
                let (right, rs) = Node::compile(r);
                let plan = DistributionPlan::from_sequences(&ls, &rs);
                (Node::Binary { op: *op, plan, left: Box::new(left), right: Box::new(right) }, e.variable_sequence())
            }
        }
    }
}

/// Operations of one evaluation domain.
trait Domain {
    type Value: Clone;
    fn unary(&self, op: UnaryOp, x: Self::Value) -> Self::Value;
    fn binary(&self, op: BinaryOp, x: Self::Value, y: Self::Value) -> Self::Value;
}

struct Reals<'a>(&'a Interpretation);
struct Intervals<'a>(&'a Interpretation);

impl Domain for Reals<'_> {
    type Value = RealResult;

    fn unary(&self, op: UnaryOp, x: RealResult) -> RealResult {
        match x {
            RealResult::Defined(v) => (self.0.unary[&op].real)(v),
            RealResult::Undefined => RealResult::Undefined,
        }
    }

    fn binary(&self, op: BinaryOp, x: RealResult, y: RealResult) -> RealResult {
        match (x, y) {
            (RealResult::Defined(a), RealResult::Defined(b)) => (self.0.binary[&op].real)(a, b),
            _ => RealResult::Undefined,
        }
    }
}

impl Domain for Intervals<'_> {
    type Value = Interval;

    fn unary(&self, op: UnaryOp, x: Interval) -> Interval {
        (self.0.unary[&op].interval)(x)
    }

    fn binary(&self, op: BinaryOp, x: Interval, y: Interval) -> Interval {
        (self.0.binary[&op].interval)(x, y)
    }
}

fn fold<D: Domain>(node: &Node, tuple: &[D::Value], domain: &D) -> D::Value {
    match node {
        Node::Var => tuple[0].clone(),
        Node::Unary(op, child) => domain.unary(*op, fold(child, tuple, domain)),
        Node::Binary { op, plan, left, right } => {
            let (lt, rt) = plan.apply(tuple);
            let l = fold(left, &lt, domain);
            let r = fold(right, &rt, domain);
            domain.binary(*op, l, r)
        }
    }
}

/// An expression with distribution plans compiled at every binary node.
#[derive(Clone, Debug)]
pub struct Compiled {
    expr: Expr,
    root: Node,
    variables: VariableSequence,
}

impl Compiled {
    pub fn new(expr: &Expr) -> Compiled {
        let (root, variables) = Node::compile(expr);
        Compiled { expr: expr.clone(), root, variables }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn variables(&self) -> &VariableSequence {
        &self.variables
    }

    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    /// The plan at the root, if the root is a binary node.
    pub fn root_plan(&self) -> Option<&DistributionPlan> {
        match &self.root {
            Node::Binary { plan, .. } => Some(plan),
            _ => None,
        }
    }

    fn check_arity(&self, got: usize) -> Result<(), EvalError> {
        if got == self.arity() {
            Ok(())
        } else {
            Err(EvalError::Arity { expected: self.arity(), got })
        }
    }

    /// Value of the real partial function at `point`, ordered by the
    /// variable sequence.
    pub fn eval_real(&self, interp: &Interpretation, point: &[f64]) -> Result<RealResult, EvalError> {
        self.check_arity(point.len())?;
        interp.check(&self.expr)?;
        let tuple: Vec<RealResult> = point.iter().map(|&v| RealResult::from_f64(v)).collect();
        Ok(fold(&self.root, &tuple, &Reals(interp)))
    }

    /// Interval set extension evaluated on `bx`, ordered by the variable
    /// sequence. Total: any box of the right arity yields an interval.
    pub fn eval_interval(&self, interp: &Interpretation, bx: &IntervalBox) -> Result<Interval, EvalError> {
        self.check_arity(bx.arity())?;
        interp.check(&self.expr)?;
        Ok(fold(&self.root, bx.dims(), &Intervals(interp)))
    }
}

pub fn eval_real(e: &Expr, interp: &Interpretation, point: &[f64]) -> Result<RealResult, EvalError> {
    Compiled::new(e).eval_real(interp, point)
}

pub fn eval_interval(e: &Expr, interp: &Interpretation, bx: &IntervalBox) -> Result<Interval, EvalError> {
    Compiled::new(e).eval_interval(interp, bx)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BindError {
    #[error("no value bound for variable `{0}`")]
    Missing(String),
    #[error("`{0}` does not occur in the expression")]
    Extra(String),
    #[error("variable `{0}` is bound more than once")]
    Duplicate(String),
    #[error("`{0}` names a constant and cannot be bound")]
    Constant(String),
}

fn index_bindings<'a, T>(parsed: &Parsed, vars: &'a [(String, T)]) -> Result<HashMap<&'a str, &'a T>, BindError> {
    let seq = parsed.expr.variable_sequence();
    let mut map = HashMap::new();
    for (name, value) in vars {
        if parsed.is_constant(name) {
            return Err(BindError::Constant(name.clone()));
        }
        if !seq.contains(name) {
            return Err(BindError::Extra(name.clone()));
        }
        if map.insert(name.as_str(), value).is_some() {
            return Err(BindError::Duplicate(name.clone()));
        }
    }
    Ok(map)
}

/// Orders user-supplied intervals by the variable sequence and fills
/// constant coordinates with their outward-rounded values. Every free
/// variable must be bound exactly once.
pub fn bind_box(parsed: &Parsed, vars: &[(String, Interval)]) -> Result<IntervalBox, BindError> {
    let map = index_bindings(parsed, vars)?;
    parsed
        .expr
        .variable_sequence()
        .names()
        .iter()
        .map(|n| match parsed.binding(n) {
            Some(b) => Ok(b.interval()),
            None => map.get(n.as_str()).map(|iv| **iv).ok_or_else(|| BindError::Missing(n.clone())),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(IntervalBox::new)
}

/// Point counterpart of [`bind_box`]; constants take their nearest binary64
/// value.
pub fn bind_point(parsed: &Parsed, vars: &[(String, f64)]) -> Result<Vec<f64>, BindError> {
    let map = index_bindings(parsed, vars)?;
    parsed
        .expr
        .variable_sequence()
        .names()
        .iter()
        .map(|n| match parsed.binding(n) {
            Some(b) => Ok(b.point()),
            None => map.get(n.as_str()).map(|v| **v).ok_or_else(|| BindError::Missing(n.clone())),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use proptest::prelude::*;

    fn e(src: &str) -> Expr {
        parse(src).unwrap().expr
    }

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn boxed(dims: &[(f64, f64)]) -> IntervalBox {
        dims.iter().map(|&(a, b)| iv(a, b)).collect()
    }

    #[test]
    fn distribution_shared_middle_variable() {
        let p = build_distribution(&e("x*y"), &e("y*z"));
        assert_eq!(p.left_indices(), &[0, 1]);
        assert_eq!(p.right_indices(), &[1, 2]);
        assert_eq!(p.combined_arity(), 3);
        assert_eq!(p.apply(&[1, 2, 3]), (vec![1, 2], vec![2, 3]));
    }

    #[test]
    fn distribution_disjoint_and_identical() {
        let p = build_distribution(&e("x"), &e("y"));
        assert_eq!((p.left_indices(), p.right_indices()), (&[0][..], &[1][..]));
        let p = build_distribution(&e("x"), &e("x"));
        assert_eq!((p.left_indices(), p.right_indices()), (&[0][..], &[0][..]));
        assert_eq!(p.combined_arity(), 1);
    }

    #[test]
    fn distribution_reorders_right_sequence() {
        // e₂ = z*x has sequence ⟨z, x⟩; x is shared at position 0.
        let p = build_distribution(&e("x*y"), &e("z*x"));
        assert_eq!(p.right_indices(), &[2, 0]);
        assert_eq!(p.combined_arity(), 3);
    }

    #[test]
    fn real_partiality() {
        let i = Interpretation::standard();
        let f = e("sqrt(-abs(x))");
        assert_eq!(eval_real(&f, &i, &[0.0]), Ok(RealResult::Defined(0.0)));
        assert_eq!(eval_real(&f, &i, &[1.0]), Ok(RealResult::Undefined));
        assert_eq!(eval_real(&e("x*y + y*z"), &i, &[1.0, 2.0, 3.0]), Ok(RealResult::Defined(8.0)));
        assert_eq!(eval_real(&e("x/y"), &i, &[1.0, 0.0]), Ok(RealResult::Undefined));
        assert_eq!(eval_real(&e("x*y"), &i, &[1e200, 1e200]), Ok(RealResult::Undefined));
        assert_eq!(eval_real(&e("x*y"), &i, &[1.0]), Err(EvalError::Arity { expected: 2, got: 1 }));
        // an undefined subterm poisons the whole result
        assert_eq!(eval_real(&e("0*(1/x)"), &i, &[0.0, 1.0, 0.0]), Ok(RealResult::Undefined));
    }

    #[test]
    fn interval_evaluation() {
        let i = Interpretation::standard();
        assert_eq!(eval_interval(&e("x - x"), &i, &boxed(&[(0.0, 1.0)])), Ok(iv(-1.0, 1.0)));
        assert_eq!(eval_interval(&e("x*y + y*z"), &i, &boxed(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)])), Ok(iv(8.0, 8.0)));
        assert_eq!(eval_interval(&e("sqrt(x)"), &i, &boxed(&[(4.0, 9.0)])), Ok(iv(2.0, 3.0)));
        assert_eq!(eval_interval(&e("sqrt(x)"), &i, &boxed(&[(-2.0, -1.0)])), Ok(Interval::EMPTY));
        assert!(eval_interval(&e("x"), &i, &boxed(&[])).is_err());
    }

    #[test]
    fn shared_variable_gets_same_coordinate() {
        // x*y + y*z on x=[1,1], y=[2,3], z=[1,1]: y appears on both sides
        // with the same coordinate interval.
        let i = Interpretation::standard();
        let r = eval_interval(&e("x*y + y*z"), &i, &boxed(&[(1.0, 1.0), (2.0, 3.0), (1.0, 1.0)])).unwrap();
        assert_eq!(r, iv(4.0, 6.0));
    }

    #[test]
    fn modes() {
        let rel = Interpretation::relational();
        let can = Interpretation::canonical();
        let b = boxed(&[(0.0, 1.0), (0.0, 0.0)]);
        assert_eq!(eval_interval(&e("x/y"), &can, &b), Ok(Interval::EMPTY));
        assert_eq!(eval_interval(&e("x/y"), &rel, &b), Ok(Interval::ENTIRE));
        let b = boxed(&[(4.0, 6.0), (1.0, 2.0)]);
        assert_eq!(eval_interval(&e("x+y"), &can, &b), Ok(iv(5.0, 8.0)));
        assert_eq!(eval_interval(&e("x+y"), &rel, &b), Ok(iv(5.0, 8.0)));
        let b = boxed(&[(4.0, 9.0)]);
        assert_eq!(eval_interval(&e("sqrt(x)"), &rel, &b), Ok(iv(-3.0, 3.0)));
        assert_eq!(eval_interval(&e("sqrtr(x)"), &can, &b), Ok(iv(-3.0, 3.0)));
    }

    #[test]
    fn missing_symbol_is_reported() {
        let i = Interpretation::empty();
        assert_eq!(eval_real(&e("x + y"), &i, &[1.0, 2.0]), Err(EvalError::MissingSymbol("+".into())));
    }

    #[test]
    fn binding_boxes_and_points() {
        let p = parse("x*y + 2").unwrap();
        let vars = vec![("y".to_owned(), iv(3.0, 4.0)), ("x".to_owned(), iv(-1.0, 2.0))];
        let b = bind_box(&p, &vars).unwrap();
        assert_eq!(b, boxed(&[(-1.0, 2.0), (3.0, 4.0), (2.0, 2.0)]));
        assert_eq!(bind_box(&p, &vars[..1]), Err(BindError::Missing("x".into())));
        let mut extra = vars.clone();
        extra.push(("q".into(), iv(0.0, 1.0)));
        assert_eq!(bind_box(&p, &extra), Err(BindError::Extra("q".into())));
        let mut dup = vars.clone();
        dup.push(("x".into(), iv(0.0, 1.0)));
        assert_eq!(bind_box(&p, &dup), Err(BindError::Duplicate("x".into())));
        assert_eq!(bind_box(&p, &[("_c0".into(), iv(0.0, 1.0))]), Err(BindError::Constant("_c0".into())));
        let pt = bind_point(&p, &[("x".into(), 1.0), ("y".into(), 2.0)]).unwrap();
        assert_eq!(pt, vec![1.0, 2.0, 2.0]);
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop::sample::select(vec!["x", "y", "z"]).prop_map(Expr::var);
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (prop::sample::select(UnaryOp::ALL.to_vec()), inner.clone()).prop_map(|(op, c)| Expr::unary(op, c)),
                (prop::sample::select(BinaryOp::ALL.to_vec()), inner.clone(), inner)
                    .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            ]
        })
    }

    fn arb_interval() -> impl Strategy<Value = Interval> {
        (-8i32..8, 0i32..8).prop_map(|(lo, w)| iv(lo as f64 / 2.0, (lo + w) as f64 / 2.0))
    }

    /// Direct substitution evaluator keyed by name, independent of plans.
    fn eval_by_name(e: &Expr, env: &std::collections::HashMap<String, Interval>, i: &Interpretation) -> Interval {
        match e {
            Expr::Var(n) => env[n],
            Expr::Unary(op, c) => (i.unary(*op).unwrap().interval)(eval_by_name(c, env, i)),
            Expr::Binary(op, l, r) => {
                (i.binary(*op).unwrap().interval)(eval_by_name(l, env, i), eval_by_name(r, env, i))
            }
        }
    }

    proptest! {
        #[test]
        fn compositional_consistency(l in arb_expr(), r in arb_expr(),
                                     op in prop::sample::select(BinaryOp::ALL.to_vec()),
                                     dims in prop::collection::vec(arb_interval(), 3)) {
            let i = Interpretation::standard();
            let whole = Expr::binary(op, l.clone(), r.clone());
            let c = Compiled::new(&whole);
            let bx: IntervalBox = dims[..c.arity()].iter().copied().collect();
            let plan = build_distribution(&l, &r);
            prop_assert_eq!(plan.combined_arity(), c.arity());
            let (lt, rt) = plan.apply(bx.dims());
            let lv = eval_interval(&l, &i, &IntervalBox::new(lt)).unwrap();
            let rv = eval_interval(&r, &i, &IntervalBox::new(rt)).unwrap();
            let expected = (i.binary(op).unwrap().interval)(lv, rv);
            prop_assert_eq!(c.eval_interval(&i, &bx).unwrap(), expected);
        }

        #[test]
        fn plan_routing_matches_name_substitution(ex in arb_expr(),
                                                  dims in prop::collection::vec(arb_interval(), 3)) {
            let i = Interpretation::canonical();
            let c = Compiled::new(&ex);
            let env = c.variables().names().iter().cloned().zip(dims.iter().copied()).collect();
            let bx: IntervalBox = dims[..c.arity()].iter().copied().collect();
            prop_assert_eq!(c.eval_interval(&i, &bx).unwrap(), eval_by_name(&ex, &env, &i));
        }

        #[test]
        fn box_monotonicity(ex in arb_expr(), dims in prop::collection::vec(arb_interval(), 3),
                            shrink in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 3)) {
            let i = Interpretation::standard();
            let c = Compiled::new(&ex);
            let outer: IntervalBox = dims[..c.arity()].iter().copied().collect();
            let inner: IntervalBox = outer.dims().iter().zip(&shrink).map(|(d, &(s, t))| {
                let (lo, hi) = d.bounds().unwrap();
                let a = lo + (hi - lo) * s.min(t);
                let b = lo + (hi - lo) * s.max(t);
                iv(a.max(lo), b.min(hi))
            }).collect();
            let ro = c.eval_interval(&i, &outer).unwrap();
            let ri = c.eval_interval(&i, &inner).unwrap();
            prop_assert!(ri.is_subset(&ro), "{} not within {}", ri, ro);
        }
    }
}
