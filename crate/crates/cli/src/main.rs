//! `relint`: evaluate, refine and enclose arithmetic expressions over
//! interval boxes.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use relint::analysis::{check_convergence, refine_toward, subdivide_enclosure, AnalysisError};
use relint::expr::parse;
use relint::interval::format_bound;
use relint::oracle::{sample_inclusion, OracleError};
use relint::semantics::{bind_box, bind_point, mode_select, Compiled, Interpretation, Mode};
use relint::{Interval, IntervalBox, Parsed};

const EXIT_VIOLATIONS: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_BINDING: u8 = 3;
const EXIT_NOT_CONVERGED: u8 = 4;
const EXIT_TARGET: u8 = 5;

#[derive(Parser)]
#[command(name = "relint", version, about = "Interval evaluation of arithmetic expressions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the interval extension of EXPR on the bound box.
    Eval(Common),
    /// Shrink the box toward a point and watch the evaluations converge.
    Refine {
        #[command(flatten)]
        common: Common,
        /// Target point, one value per free variable in order of first occurrence.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        at: Vec<f64>,
        #[arg(long, default_value_t = 40)]
        steps: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Tighten a range enclosure by bisecting the box.
    Enclose {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_boxes: usize,
    },
    /// Sample points of the box and count values outside the evaluation.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    /// Expression, e.g. "x*y + sqrt(z)".
    expr: String,
    /// Bind a variable: NAME=[lo,hi]. Repeat for each free variable.
    #[arg(long = "var", value_name = "NAME=[lo,hi]")]
    vars: Vec<String>,
    /// Extension used for `/` and `sqrt`. Defaults to relational `/` with
    /// canonical `sqrt`.
    #[arg(long)]
    mode: Option<Mode>,
    /// Print a JSON object instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Serialize)]
struct Report {
    result: String,
    mode: String,
    widths: Vec<f64>,
    converged: Option<bool>,
    violations: Option<usize>,
    #[serde(skip)]
    text: String,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Failure {
        Failure { code, message: message.to_string() }
    }
}

fn analysis_failure(e: AnalysisError) -> Failure {
    match e {
        AnalysisError::TargetOutsideBox | AnalysisError::UndefinedAtTarget => Failure::new(EXIT_TARGET, e),
        _ => Failure::new(EXIT_BINDING, e),
    }
}

fn parse_var(arg: &str) -> Result<(String, Interval), Failure> {
    let (name, iv) = arg
        .split_once('=')
        .ok_or_else(|| Failure::new(EXIT_BINDING, format!("expected NAME=[lo,hi], got `{arg}`")))?;
    let iv: Interval = iv.parse().map_err(|e| Failure::new(EXIT_BINDING, format!("bad interval for `{name}`: {e}")))?;
    Ok((name.trim().to_owned(), iv))
}

struct Setup {
    parsed: Parsed,
    compiled: Compiled,
    interp: Interpretation,
    bx: IntervalBox,
    mode: String,
}

fn setup(common: &Common) -> Result<Setup, Failure> {
    let parsed = parse(&common.expr).map_err(|e| Failure::new(EXIT_PARSE, e))?;
    let vars = common.vars.iter().map(|v| parse_var(v)).collect::<Result<Vec<_>, _>>()?;
    let bx = bind_box(&parsed, &vars).map_err(|e| Failure::new(EXIT_BINDING, e))?;
    let interp = match common.mode {
        Some(m) => mode_select(&Interpretation::standard(), m),
        None => Interpretation::standard(),
    };
    Ok(Setup {
        compiled: Compiled::new(&parsed.expr),
        parsed,
        interp,
        bx,
        mode: common.mode.map_or_else(|| "default".to_owned(), |m| m.to_string()),
    })
}

fn join_widths(widths: &[f64]) -> String {
    widths.iter().map(|w| format_bound(*w)).collect::<Vec<_>>().join(" ")
}

fn run(command: &Command) -> Result<(Report, u8), Failure> {
    match command {
        Command::Eval(common) => {
            let s = setup(common)?;
            let result = s.compiled.eval_interval(&s.interp, &s.bx).map_err(|e| Failure::new(EXIT_BINDING, e))?;
            Ok((
                Report {
                    result: result.to_string(),
                    mode: s.mode,
                    widths: vec![result.width()],
                    converged: None,
                    violations: None,
                    text: result.to_string(),
                },
                0,
            ))
        }
        Command::Refine { common, at, steps, tol } => {
            let s = setup(common)?;
            let free = s.parsed.free_variables();
            if at.len() != free.len() {
                return Err(Failure::new(
                    EXIT_BINDING,
                    format!("--at needs {} values ({}), got {}", free.len(), free.join(","), at.len()),
                ));
            }
            let named: Vec<(String, f64)> = free.into_iter().zip(at.iter().copied()).collect();
            let point = bind_point(&s.parsed, &named).map_err(|e| Failure::new(EXIT_BINDING, e))?;
            let seq = refine_toward(&s.bx, &point, *steps).map_err(analysis_failure)?;
            let r = check_convergence(&s.compiled, &s.interp, &seq, *tol).map_err(analysis_failure)?;
            let mut text = String::new();
            writeln!(text, "result: {}", r.enclosure).unwrap();
            writeln!(text, "widths: {}", join_widths(&r.widths)).unwrap();
            writeln!(text, "nested: {}", r.nested).unwrap();
            write!(text, "converged: {}", r.converged).unwrap();
            let code = if r.converged { 0 } else { EXIT_NOT_CONVERGED };
            Ok((
                Report {
                    result: r.enclosure.to_string(),
                    mode: s.mode,
                    widths: r.widths,
                    converged: Some(r.converged),
                    violations: None,
                    text,
                },
                code,
            ))
        }
        Command::Enclose { common, tol, max_boxes } => {
            let s = setup(common)?;
            let r = subdivide_enclosure(&s.compiled, &s.interp, &s.bx, *tol, *max_boxes).map_err(analysis_failure)?;
            let mut text = String::new();
            writeln!(text, "result: {}", r.enclosure).unwrap();
            writeln!(text, "width: {}", format_bound(r.enclosure.width())).unwrap();
            writeln!(text, "boxes: {}", r.iterations + 1).unwrap();
            write!(text, "converged: {}", r.converged).unwrap();
            let code = if r.converged { 0 } else { EXIT_NOT_CONVERGED };
            Ok((
                Report {
                    result: r.enclosure.to_string(),
                    mode: s.mode,
                    widths: r.widths,
                    converged: Some(r.converged),
                    violations: None,
                    text,
                },
                code,
            ))
        }
        Command::Check { common, samples, seed } => {
            let s = setup(common)?;
            let r = sample_inclusion(&s.compiled, &s.interp, &s.bx, *samples, *seed).map_err(|e| match e {
                OracleError::Unbounded => Failure::new(EXIT_BINDING, "check needs a bounded box"),
                other => Failure::new(EXIT_BINDING, other),
            })?;
            let mut text = String::new();
            writeln!(text, "result: {}", r.enclosure).unwrap();
            writeln!(text, "samples: {}", r.samples).unwrap();
            writeln!(text, "defined: {}", r.defined).unwrap();
            for v in &r.violations {
                let at: Vec<String> = v.point.iter().map(|x| format_bound(*x)).collect();
                writeln!(text, "violation: at ({}) value {}", at.join(","), format_bound(v.value)).unwrap();
            }
            write!(text, "violations: {}", r.violation_count()).unwrap();
            let code = if r.violations.is_empty() { 0 } else { EXIT_VIOLATIONS };
            Ok((
                Report {
                    result: r.enclosure.to_string(),
                    mode: s.mode,
                    widths: vec![r.enclosure.width()],
                    converged: None,
                    violations: Some(r.violation_count()),
                    text,
                },
                code,
            ))
        }
    }
}

fn json_requested(command: &Command) -> bool {
    match command {
        Command::Eval(c) => c.json,
        Command::Refine { common, .. } | Command::Enclose { common, .. } | Command::Check { common, .. } => common.json,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok((report, code)) => {
            if json_requested(&cli.command) {
                println!("{}", serde_json::to_string(&report).expect("report serializes"));
            } else {
                println!("{}", report.text);
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
