//! Interval arithmetic founded on sets.
//!
//! Intervals are sets of reals, every operation is the floating-point hull
//! of a relational image, and expressions denote functions built by routing
//! a combined argument tuple to their subexpressions. The same expression
//! can be evaluated over reals (as a partial function) or over intervals (as
//! a total set extension), and the [`oracle`] and [`analysis`] modules check
//! the containment and convergence properties that tie the two together.

pub mod analysis;
pub mod expr;
pub mod interval;
pub mod oracle;
pub mod semantics;

pub use expr::{Binding, Expr, ParseError, Parsed, VariableSequence};
pub use interval::{Interval, IntervalBox, IntervalError};
pub use semantics::{bind_box, bind_point, Compiled, Interpretation, Mode, RealResult};
