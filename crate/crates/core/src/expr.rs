//! Expressions over variables, unary and binary operation symbols.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := IDENT | NUMBER | '(' expr ')' | ('-'|'abs'|'sqrt'|'sqrtr') factor
//! ```
//!
//! Numeric literals never reach the tree: each one becomes a fresh variable
//! (`_c0`, `_c1`, ...) and a [`Binding`] that records its exact decimal value.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::interval::{hull_bounds, parse_decimal, round_down, round_up, ExactReal, Interval};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryOp {
    Neg,
    Abs,
    /// Non-negative square root.
    Sqrt,
    /// Square root as the relation `y² = x`.
    SqrtRel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 4] = [UnaryOp::Neg, UnaryOp::Abs, UnaryOp::Sqrt, UnaryOp::SqrtRel];

    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Abs => "abs",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::SqrtRel => "sqrtr",
        }
    }

    fn from_keyword(word: &str) -> Option<UnaryOp> {
        match word {
            "abs" => Some(UnaryOp::Abs),
            "sqrt" => Some(UnaryOp::Sqrt),
            "sqrtr" => Some(UnaryOp::SqrtRel),
            _ => None,
        }
    }
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 4] = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div];

    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => 1,
            BinaryOp::Mul | BinaryOp::Div => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn unary(op: UnaryOp, child: Expr) -> Expr {
        Expr::Unary(op, Box::new(child))
    }

    pub fn binary(op: BinaryOp, left: Expr, right: Expr) -> Expr {
        Expr::Binary(op, Box::new(left), Box::new(right))
    }

    /// Var ↦ 0, otherwise one more than the deepest child.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Var(_) => 0,
            Expr::Unary(_, c) => 1 + c.depth(),
            Expr::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Distinct variables ordered by first occurrence in a left-to-right
    /// depth-first walk.
    pub fn variable_sequence(&self) -> VariableSequence {
        let mut names = Vec::new();
        let mut seen = HashSet::new();
        self.visit_vars(&mut |name| {
            if seen.insert(name.to_owned()) {
                names.push(name.to_owned());
            }
        });
        VariableSequence(names)
    }

    /// True iff no variable occurs more than once.
    pub fn occurs_once(&self) -> bool {
        let mut seen = HashSet::new();
        let mut once = true;
        self.visit_vars(&mut |name| {
            if !seen.insert(name.to_owned()) {
                once = false;
            }
        });
        once
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Var(_) => 1,
            Expr::Unary(_, c) => 1 + c.size(),
            Expr::Binary(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    fn visit_vars(&self, f: &mut impl FnMut(&str)) {
        match self {
            Expr::Var(name) => f(name),
            Expr::Unary(_, c) => c.visit_vars(f),
            Expr::Binary(_, l, r) => {
                l.visit_vars(f);
                r.visit_vars(f);
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        match self {
            Expr::Var(name) => f.write_str(name),
            Expr::Unary(op, child) => {
                match op {
                    UnaryOp::Neg => f.write_str("-")?,
                    other => write!(f, "{}", other.symbol())?,
                }
                if matches!(op, UnaryOp::Neg) && !matches!(**child, Expr::Binary(..)) {
                    child.fmt_prec(f, 3)
                } else {
                    f.write_str("(")?;
                    child.fmt_prec(f, 0)?;
                    f.write_str(")")
                }
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                let paren = p < min_prec;
                if paren {
                    f.write_str("(")?;
                }
                l.fmt_prec(f, p)?;
                write!(f, " {} ", op.symbol())?;
                r.fmt_prec(f, p + 1)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Prints with the minimum parentheses needed to parse back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Distinct variable names in first-occurrence order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VariableSequence(Vec<String>);

impl VariableSequence {
    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }
}

/// A desugared numeric literal: the fresh variable that replaced it and its
/// exact value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    pub name: String,
    pub value: BigRational,
    pub literal: String,
}

impl Binding {
    /// The degenerate outward-rounded interval containing the value.
    pub fn interval(&self) -> Interval {
        let v = ExactReal::Finite(self.value.clone());
        hull_bounds(Some((&v, &v)))
    }

    /// Nearest binary64 to the value, used for point evaluation. It always
    /// lies inside [`Binding::interval`].
    pub fn point(&self) -> f64 {
        let v = ExactReal::Finite(self.value.clone());
        let lo = round_down(&v).value();
        let hi = round_up(&v).value();
        let nearest: f64 = self.literal.parse().unwrap_or(lo);
        nearest.clamp(lo, hi)
    }
}

/// Output of [`parse`]: the tree plus one binding per literal.
#[derive(Clone, Debug, PartialEq)]
pub struct Parsed {
    pub expr: Expr,
    pub bindings: Vec<Binding>,
}

impl Parsed {
    pub fn is_constant(&self, name: &str) -> bool {
        self.bindings.iter().any(|b| b.name == name)
    }

    pub fn binding(&self, name: &str) -> Option<&Binding> {
        self.bindings.iter().find(|b| b.name == name)
    }

    /// The variable sequence without desugared constants.
    pub fn free_variables(&self) -> Vec<String> {
        self.expr.variable_sequence().names().iter().filter(|n| !self.is_constant(n)).cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown operation symbol `{symbol}` at {position}")]
    UnknownOperation { position: usize, symbol: String },
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Ident(String),
    Number(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    End,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((start, Token::Plus)),
            b'-' => out.push((start, Token::Minus)),
            b'*' => out.push((start, Token::Star)),
            b'/' => out.push((start, Token::Slash)),
            b'(' => out.push((start, Token::LParen)),
            b')' => out.push((start, Token::RParen)),
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(src[start..i].to_owned())));
                continue;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                out.push((start, Token::Number(src[start..i].to_owned())));
                continue;
            }
            _ => {
                return Err(ParseError::Syntax {
                    position: start,
                    message: format!("unexpected character `{}`", src[start..].chars().next().unwrap()),
                })
            }
        }
        i += 1;
    }
    out.push((src.len(), Token::End));
    Ok(out)
}

/// Literal placeholder used before fresh names are assigned.
enum Raw {
    Var(String),
    Const(String),
    Unary(UnaryOp, Box<Raw>),
    Binary(BinaryOp, Box<Raw>, Box<Raw>),
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].1.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { position: self.offset(), message: message.into() }
    }

    fn expr(&mut self) -> Result<Raw, ParseError> {
        let mut left = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinaryOp::Add,
                Token::Minus => BinaryOp::Sub,
                _ => return Ok(left),
            };
            self.bump();
            let right = self.term()?;
            left = Raw::Binary(op, Box::new(left), Box::new(right));
        }
    }

    fn term(&mut self) -> Result<Raw, ParseError> {
        let mut left = self.factor()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinaryOp::Mul,
                Token::Slash => BinaryOp::Div,
                _ => return Ok(left),
            };
            self.bump();
            let right = self.factor()?;
            left = Raw::Binary(op, Box::new(left), Box::new(right));
        }
    }

    fn factor(&mut self) -> Result<Raw, ParseError> {
        let at = self.offset();
        match self.bump() {
            Token::Minus => Ok(Raw::Unary(UnaryOp::Neg, Box::new(self.factor()?))),
            Token::Number(text) => {
                parse_decimal(&text)
                    .map_err(|_| ParseError::Syntax { position: at, message: format!("malformed number `{text}`") })?;
                Ok(Raw::Const(text))
            }
            Token::LParen => {
                let inner = self.expr()?;
                match self.bump() {
                    Token::RParen => Ok(inner),
                    _ => Err(ParseError::Syntax {
                        position: self.tokens[self.pos.saturating_sub(1)].0,
                        message: "expected `)`".into(),
                    }),
                }
            }
            Token::Ident(name) => {
                if let Some(op) = UnaryOp::from_keyword(&name) {
                    return Ok(Raw::Unary(op, Box::new(self.factor()?)));
                }
                if *self.peek() == Token::LParen {
                    return Err(ParseError::UnknownOperation { position: at, symbol: name });
                }
                Ok(Raw::Var(name))
            }
            Token::End => Err(ParseError::Syntax { position: at, message: "unexpected end of input".into() }),
            other => Err(ParseError::Syntax { position: at, message: format!("unexpected {}", describe(&other)) }),
        }
    }
}

fn describe(t: &Token) -> String {
    match t {
        Token::Ident(s) | Token::Number(s) => format!("`{s}`"),
        Token::Plus => "`+`".into(),
        Token::Minus => "`-`".into(),
        Token::Star => "`*`".into(),
        Token::Slash => "`/`".into(),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
        Token::End => "end of input".into(),
    }
}

fn collect_idents(raw: &Raw, out: &mut HashSet<String>) {
    match raw {
        Raw::Var(n) => {
            out.insert(n.clone());
        }
        Raw::Const(_) => {}
        Raw::Unary(_, c) => collect_idents(c, out),
        Raw::Binary(_, l, r) => {
            collect_idents(l, out);
            collect_idents(r, out);
        }
    }
}

struct Desugar {
    taken: HashSet<String>,
    next: usize,
    bindings: Vec<Binding>,
}

impl Desugar {
    fn fresh(&mut self) -> String {
        loop {
            let name = format!("_c{}", self.next);
            self.next += 1;
            if !self.taken.contains(&name) {
                return name;
            }
        }
    }

    fn run(&mut self, raw: Raw) -> Expr {
        match raw {
            Raw::Var(n) => Expr::Var(n),
            Raw::Const(text) => {
                let name = self.fresh();
                let value = parse_decimal(&text).expect("validated while parsing");
                self.bindings.push(Binding { name: name.clone(), value, literal: text });
                Expr::Var(name)
            }
            Raw::Unary(op, c) => Expr::unary(op, self.run(*c)),
            Raw::Binary(op, l, r) => {
                let l = self.run(*l);
                let r = self.run(*r);
                Expr::binary(op, l, r)
            }
        }
    }
}

/// Parses source text into an expression plus constant bindings.
pub fn parse(source: &str) -> Result<Parsed, ParseError> {
    let mut parser = Parser { tokens: tokenize(source)?, pos: 0 };
    let raw = parser.expr()?;
    if *parser.peek() != Token::End {
        return Err(parser.error(format!("unexpected {}", describe(parser.peek()))));
    }
    let mut taken = HashSet::new();
    collect_idents(&raw, &mut taken);
    let mut desugar = Desugar { taken, next: 0, bindings: Vec::new() };
    let expr = desugar.run(raw);
    Ok(Parsed { expr, bindings: desugar.bindings })
}

/// Counts occurrences of each variable; handy for tests and diagnostics.
pub fn occurrence_counts(e: &Expr) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    e.visit_vars(&mut |n| *counts.entry(n.to_owned()).or_insert(0) += 1);
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(n: &str) -> Expr {
        Expr::var(n)
    }

    fn names(e: &Expr) -> Vec<String> {
        e.variable_sequence().names().to_vec()
    }

    #[test]
    fn parses_shared_product_sum() {
        let p = parse("x*y + y*z").unwrap();
        let expected = Expr::binary(
            BinaryOp::Add,
            Expr::binary(BinaryOp::Mul, v("x"), v("y")),
            Expr::binary(BinaryOp::Mul, v("y"), v("z")),
        );
        assert_eq!(p.expr, expected);
        assert!(p.bindings.is_empty());
    }

    #[test]
    fn parses_nested_unaries() {
        let p = parse("sqrt(-abs(x))").unwrap();
        let expected = Expr::unary(UnaryOp::Sqrt, Expr::unary(UnaryOp::Neg, Expr::unary(UnaryOp::Abs, v("x"))));
        assert_eq!(p.expr, expected);
    }

    #[test]
    fn desugars_constants() {
        let p = parse("x + 2").unwrap();
        assert_eq!(p.expr, Expr::binary(BinaryOp::Add, v("x"), v("_c0")));
        assert_eq!(p.bindings.len(), 1);
        assert_eq!(p.bindings[0].name, "_c0");
        assert_eq!(p.bindings[0].value, BigRational::from_integer(2.into()));
        assert_eq!(p.bindings[0].interval(), Interval::new(2.0, 2.0).unwrap());
    }

    #[test]
    fn constant_names_avoid_user_variables() {
        let p = parse("_c0 + 1 + 2").unwrap();
        let seq = names(&p.expr);
        assert_eq!(seq, vec!["_c0", "_c1", "_c2"]);
        assert_eq!(p.bindings[0].name, "_c1");
        assert_eq!(p.free_variables(), vec!["_c0".to_owned()]);
    }

    #[test]
    fn constant_point_lies_in_its_interval() {
        let p = parse("0.1 * x").unwrap();
        let b = &p.bindings[0];
        assert_eq!(b.point(), 0.1);
        assert!(b.interval().contains(b.point()));
        assert!(!b.interval().is_singleton());
    }

    #[test]
    fn precedence_and_associativity() {
        let p = parse("a - b - c").unwrap().expr;
        assert_eq!(p, Expr::binary(BinaryOp::Sub, Expr::binary(BinaryOp::Sub, v("a"), v("b")), v("c")));
        let p = parse("-a*b").unwrap().expr;
        assert_eq!(p, Expr::binary(BinaryOp::Mul, Expr::unary(UnaryOp::Neg, v("a")), v("b")));
        let p = parse("a + b / c").unwrap().expr;
        assert_eq!(p, Expr::binary(BinaryOp::Add, v("a"), Expr::binary(BinaryOp::Div, v("b"), v("c"))));
        let p = parse("abs x * y").unwrap().expr;
        assert_eq!(p, Expr::binary(BinaryOp::Mul, Expr::unary(UnaryOp::Abs, v("x")), v("y")));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse("exp(x)"), Err(ParseError::UnknownOperation { position: 0, symbol: "exp".into() }));
        assert!(matches!(parse("x +"), Err(ParseError::Syntax { position: 3, .. })));
        assert!(matches!(parse("(x"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("x y"), Err(ParseError::Syntax { position: 2, .. })));
        assert!(matches!(parse("x # y"), Err(ParseError::Syntax { position: 2, .. })));
        assert!(matches!(parse("1.2.3"), Err(ParseError::Syntax { position: 0, .. })));
        assert!(matches!(parse(""), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("abs"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn variable_sequences() {
        assert_eq!(names(&parse("x*y + y*z").unwrap().expr), vec!["x", "y", "z"]);
        assert_eq!(names(&parse("y + x*y").unwrap().expr), vec!["y", "x"]);
        assert_eq!(names(&v("x")), vec!["x"]);
    }

    #[test]
    fn depth_and_occurrence() {
        assert_eq!(v("x").depth(), 0);
        assert_eq!(parse("x*y").unwrap().expr.depth(), 1);
        assert_eq!(parse("x*y + y*z").unwrap().expr.depth(), 2);
        assert!(parse("x*y + z").unwrap().expr.occurs_once());
        assert!(!parse("x - x").unwrap().expr.occurs_once());
        assert!(!parse("x*y + y*z").unwrap().expr.occurs_once());
        assert!(parse("x + 1 + 1").unwrap().expr.occurs_once());
    }

    #[test]
    fn display_forms() {
        for src in ["x * y + y * z", "-(a + b)", "a - (b - c)", "abs(x) * sqrtr(y)", "--x", "-abs(x)", "a / (b * c)"] {
            assert_eq!(parse(src).unwrap().expr.to_string(), src);
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop::sample::select(vec!["x", "y", "z", "w"]).prop_map(Expr::var);
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                (prop::sample::select(UnaryOp::ALL.to_vec()), inner.clone()).prop_map(|(op, c)| Expr::unary(op, c)),
                (prop::sample::select(BinaryOp::ALL.to_vec()), inner.clone(), inner)
                    .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            ]
        })
    }

    fn brute_depth(e: &Expr) -> usize {
        // longest root-to-leaf path, counted in edges
        fn paths(e: &Expr, d: usize, out: &mut Vec<usize>) {
            match e {
                Expr::Var(_) => out.push(d),
                Expr::Unary(_, c) => paths(c, d + 1, out),
                Expr::Binary(_, l, r) => {
                    paths(l, d + 1, out);
                    paths(r, d + 1, out);
                }
            }
        }
        let mut out = Vec::new();
        paths(e, 0, &mut out);
        out.into_iter().max().unwrap()
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let printed = e.to_string();
            let back = parse(&printed).unwrap();
            prop_assert!(back.bindings.is_empty());
            prop_assert_eq!(back.expr, e);
        }

        #[test]
        fn sequence_of_binary_is_left_then_new_right(l in arb_expr(), r in arb_expr()) {
            let e = Expr::binary(BinaryOp::Add, l.clone(), r.clone());
            let mut expected = names(&l);
            for n in names(&r) {
                if !expected.contains(&n) {
                    expected.push(n);
                }
            }
            prop_assert_eq!(names(&e), expected);
        }

        #[test]
        fn depth_and_occurs_once_match_brute_force(e in arb_expr()) {
            prop_assert_eq!(e.depth(), brute_depth(&e));
            let counts = occurrence_counts(&e);
            prop_assert_eq!(e.occurs_once(), counts.values().all(|&c| c == 1));
        }
    }
}
