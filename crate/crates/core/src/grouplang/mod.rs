//! The group-definition format (GDF) and its expression language.
//!
//! ```text
//! group galilei
//! params m=1 hbar=1
//! coords t x v phi
//! central phi
//! identity 0 0 0 0
//! time t
//! law:
//! t'' = t' + t
//! x'' = x' + x + v'*t
//! v'' = v' + v
//! phi'' = phi' + phi + (m/hbar)*(x'*v + t*(v'*v + 0.5*v'^2))
//! ```
//!
//! Primed identifiers refer to the left factor, unprimed ones to the right
//! factor. The optional `time NAME` line names the evolution coordinate and
//! `ball NAME+` marks coordinates sampled jointly from the unit ball.

mod expr;
mod gdf;
mod parser;

pub use expr::{BinOp, Expr, Func, NameContext};
pub use gdf::{parse_group_file, GroupDefinition};
pub use parser::{parse_expression, parse_expression_at};

/// Evaluates `expr` with `left` as the primed and `right` as the unprimed
/// arguments.
pub fn eval_expr<S: crate::jetcalc::Scalar>(
    expr: &Expr,
    left: &[S],
    right: &[S],
    params: &[f64],
) -> crate::Result<S> {
    expr.eval(left, right, params)
}
