//! Independent ground truth for testing: exact rational oracles, sampled
//! inclusion checks, random case generators and plain-text manifests.

mod manifest;
mod rational;
mod sampling;

use thiserror::Error;

use crate::semantics::EvalError;

pub use manifest::{parse_manifest, run_case, Case, Check, Failure};
pub use rational::{corner_range_oracle, eval_exact, outward_steps, relational_oracle, OracleOp, RationalInterval};
pub use sampling::{
    random_box, random_dyadic_box, random_expr, random_interval, random_single_occurrence, sample_inclusion,
    sample_interval, sample_point, well_conditioned, ExprShape, InclusionReport, Violation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle inputs must be bounded")]
    Unbounded,
    #[error("grid resolution must be at least 2, got {0}")]
    Grid(usize),
    #[error("expected {expected} coordinates, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("operation `{0}` is not supported by the exact evaluator")]
    Unsupported(String),
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}
