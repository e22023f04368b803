//! Plain-text test manifests.
//!
//! One case per line: `seed "expr" box check...`, where `box` is
//! `x=[lo,hi];y=[lo,hi]` (or `-` for a constant expression) and each check is
//! one of
//!
//! * `violations=N` (sampled inclusion, see [`sample_inclusion`]),
//! * `equals=[lo,hi]` or `equals=empty` (exact interval result),
//! * `contains=v` (the result contains `v`),
//! * `mode=relational|canonical` (applies to the whole line),
//! * `samples=N` (default 100).
//!
//! `#` starts a comment.

use std::fmt;

use super::sampling::sample_inclusion;
use super::OracleError;
use crate::expr::{parse, Parsed};
use crate::interval::Interval;
use crate::semantics::{bind_box, mode_select, Compiled, Interpretation, Mode};

const DEFAULT_SAMPLES: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub enum Check {
    Violations(usize),
    Equals(Interval),
    Contains(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Case {
    pub line: usize,
    pub seed: u64,
    pub source: String,
    pub vars: Vec<(String, Interval)>,
    pub mode: Option<Mode>,
    pub samples: usize,
    pub checks: Vec<Check>,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {} \"{}\"", self.line, self.seed, self.source)
    }
}

fn malformed(line: usize, message: impl Into<String>) -> OracleError {
    OracleError::Manifest { line, message: message.into() }
}

fn parse_box(line: usize, text: &str) -> Result<Vec<(String, Interval)>, OracleError> {
    if text == "-" {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|part| {
            let (name, iv) =
                part.split_once('=').ok_or_else(|| malformed(line, format!("expected NAME=[lo,hi], got `{part}`")))?;
            let iv: Interval = iv.parse().map_err(|e| malformed(line, format!("{e}")))?;
            Ok((name.trim().to_owned(), iv))
        })
        .collect()
}

fn parse_line(line: usize, text: &str) -> Result<Case, OracleError> {
    let (seed, rest) =
        text.split_once(char::is_whitespace).ok_or_else(|| malformed(line, "expected `seed \"expr\" box check`"))?;
    let seed: u64 = seed.parse().map_err(|_| malformed(line, format!("bad seed `{seed}`")))?;
    let rest = rest.trim_start();
    let rest = rest.strip_prefix('"').ok_or_else(|| malformed(line, "expression must be quoted"))?;
    let (source, rest) = rest.split_once('"').ok_or_else(|| malformed(line, "unterminated expression quote"))?;
    let mut tokens = rest.split_whitespace();
    let vars = parse_box(line, tokens.next().ok_or_else(|| malformed(line, "missing box"))?)?;
    let mut case =
        Case { line, seed, source: source.to_owned(), vars, mode: None, samples: DEFAULT_SAMPLES, checks: Vec::new() };
    for token in tokens {
        let (key, value) =
            token.split_once('=').ok_or_else(|| malformed(line, format!("expected key=value, got `{token}`")))?;
        let bad = || malformed(line, format!("bad value in `{token}`"));
        match key {
            "violations" => case.checks.push(Check::Violations(value.parse().map_err(|_| bad())?)),
            "equals" => case.checks.push(Check::Equals(value.parse().map_err(|e| malformed(line, format!("{e}")))?)),
            "contains" => case.checks.push(Check::Contains(value.parse().map_err(|_| bad())?)),
            "samples" => case.samples = value.parse().map_err(|_| bad())?,
            "mode" => case.mode = Some(value.parse().map_err(|e: String| malformed(line, e))?),
            other => return Err(malformed(line, format!("unknown check `{other}`"))),
        }
    }
    if case.checks.is_empty() {
        return Err(malformed(line, "no checks"));
    }
    Ok(case)
}

pub fn parse_manifest(text: &str) -> Result<Vec<Case>, OracleError> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| parse_line(i, l))
        .collect()
}

/// Outcome of one check that did not hold.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub check: Check,
    pub observed: String,
}

/// Runs every check of `case`; an empty vector means the case passed.
pub fn run_case(case: &Case) -> Result<Vec<Failure>, OracleError> {
    let parsed: Parsed = parse(&case.source).map_err(|e| malformed(case.line, e.to_string()))?;
    let bx = bind_box(&parsed, &case.vars).map_err(|e| malformed(case.line, e.to_string()))?;
    let interp = match case.mode {
        Some(m) => mode_select(&Interpretation::standard(), m),
        None => Interpretation::standard(),
    };
    let compiled = Compiled::new(&parsed.expr);
    let result = compiled.eval_interval(&interp, &bx)?;
    let mut failures = Vec::new();
    for check in &case.checks {
        let observed = match check {
            Check::Violations(n) => {
                let report = sample_inclusion(&compiled, &interp, &bx, case.samples, case.seed)?;
                (report.violation_count() != *n).then(|| format!("{} violations", report.violation_count()))
            }
            Check::Equals(want) => (result != *want).then(|| result.to_string()),
            Check::Contains(v) => (!result.contains(*v)).then(|| result.to_string()),
        };
        if let Some(observed) = observed {
            failures.push(Failure { check: check.clone(), observed });
        }
    }
    Ok(failures)
}
