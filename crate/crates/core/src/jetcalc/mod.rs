//! Jets, small dense linear algebra and a fixed-step integrator.

mod jet;
pub mod linalg;
mod ode;
mod scalar;

pub use jet::Jet2;
pub use linalg::{nullspace, NullspaceResult, DEFAULT_NULLSPACE_TOL};
pub use ode::{rk4_integrate, OdeTrajectory};
pub use scalar::Scalar;

/// Elementary operations accepted by [`jet_eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Sin,
    Cos,
    Tan,
    Asin,
    Sqrt,
    Exp,
    Pow(i32),
}

/// Applies one elementary operation to jets; binary operations take two
/// arguments and unary ones take one.
pub fn jet_eval(op: ElementaryOp, args: &[Jet2]) -> crate::Result<Jet2> {
    use ElementaryOp::*;
    let arity = matches!(op, Add | Sub | Mul | Div) as usize + 1;
    if args.len() != arity {
        return Err(crate::Error::Argument(format!(
            "{op:?} takes {arity} argument(s), got {}",
            args.len()
        )));
    }
    let a = &args[0];
    Ok(match op {
        Add => a + &args[1],
        Sub => a - &args[1],
        Mul => a * &args[1],
        Div => a * &args[1].recip()?,
        Neg => a.scale(-1.0),
        Sin => a.sin(),
        Cos => a.cos(),
        Tan => a.tan()?,
        Asin => a.asin()?,
        Sqrt => a.sqrt()?,
        Exp => a.exp(),
        Pow(n) => a.powi(n)?,
    })
}
