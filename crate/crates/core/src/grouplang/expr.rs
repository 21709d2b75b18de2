use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::jetcalc::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Asin,
    Sqrt,
    Exp,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "asin" => Func::Asin,
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Asin => "asin",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
        }
    }

    fn apply<S: Scalar>(self, x: S) -> Result<S> {
        match self {
            Func::Sin => Ok(x.sin()),
            Func::Cos => Ok(x.cos()),
            Func::Tan => x.try_tan(),
            Func::Asin => x.try_asin(),
            Func::Sqrt => x.try_sqrt(),
            Func::Exp => Ok(x.exp()),
        }
    }
}

/// Names an expression may refer to. Coordinates may appear primed (left
/// factor) when `allow_primed` is set; parameters never carry a prime.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NameContext {
    pub coords: Vec<String>,
    pub params: Vec<String>,
    pub allow_primed: bool,
}

impl NameContext {
    pub fn new(coords: &[&str], params: &[&str], allow_primed: bool) -> Self {
        NameContext {
            coords: coords.iter().map(|s| s.to_string()).collect(),
            params: params.iter().map(|s| s.to_string()).collect(),
            allow_primed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Numeric literal; the source text is kept for exact rational reading.
    Num {
        value: f64,
        text: String,
    },
    /// Coordinate reference; `primed` selects the left factor.
    Coord {
        index: usize,
        primed: bool,
    },
    Param(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    /// Evaluates with `left` supplying primed coordinates and `right` the
    /// unprimed ones.
    pub fn eval<S: Scalar>(&self, left: &[S], right: &[S], params: &[f64]) -> Result<S> {
        Ok(match self {
            Expr::Num { value, .. } => S::constant(*value),
            Expr::Coord { index, primed } => {
                let src = if *primed { left } else { right };
                src.get(*index).cloned().ok_or_else(|| {
                    Error::Argument(format!(
                        "coordinate index {index} missing from {} argument",
                        if *primed { "left" } else { "right" }
                    ))
                })?
            }
            Expr::Param(i) => S::constant(
                *params
                    .get(*i)
                    .ok_or_else(|| Error::Argument(format!("parameter index {i} unbound")))?,
            ),
            Expr::Neg(e) => -e.eval(left, right, params)?,
            Expr::Binary(op, a, b) => {
                let x = a.eval(left, right, params)?;
                let y = b.eval(left, right, params)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x.try_div(y)?,
                }
            }
            Expr::Call(f, a) => f.apply(a.eval(left, right, params)?)?,
            Expr::Pow(b, n) => {
                let exp = i32::try_from(*n)
                    .map_err(|_| Error::Argument(format!("exponent {n} too large")))?;
                b.eval(left, right, params)?.try_powi(exp)?
            }
        })
    }

    /// Renders source text that parses back to an identical tree.
    pub fn render(&self, ctx: &NameContext) -> String {
        let mut out = String::new();
        self.write(ctx, &mut out);
        out
    }

    fn write(&self, ctx: &NameContext, out: &mut String) {
        match self {
            Expr::Num { text, .. } => out.push_str(text),
            Expr::Coord { index, primed } => {
                out.push_str(&ctx.coords[*index]);
                if *primed {
                    out.push('\'');
                }
            }
            Expr::Param(i) => out.push_str(&ctx.params[*i]),
            Expr::Neg(e) => {
                out.push_str("(-");
                e.write_atom(ctx, out);
                out.push(')');
            }
            Expr::Binary(op, a, b) => {
                out.push('(');
                a.write(ctx, out);
                let _ = write!(out, " {} ", op.symbol());
                b.write(ctx, out);
                out.push(')');
            }
            Expr::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write(ctx, out);
                out.push(')');
            }
            Expr::Pow(b, n) => {
                b.write_atom(ctx, out);
                let _ = write!(out, "^{n}");
            }
        }
    }

    fn write_atom(&self, ctx: &NameContext, out: &mut String) {
        match self {
            Expr::Num { .. } | Expr::Coord { .. } | Expr::Param(_) | Expr::Call(..) => {
                self.write(ctx, out)
            }
            Expr::Binary(..) | Expr::Neg(_) => self.write(ctx, out),
            Expr::Pow(..) => {
                out.push('(');
                self.write(ctx, out);
                out.push(')');
            }
        }
    }

    /// Visits every coordinate reference.
    pub fn coords_used(&self, f: &mut impl FnMut(usize, bool)) {
        match self {
            Expr::Coord { index, primed } => f(*index, *primed),
            Expr::Num { .. } | Expr::Param(_) => {}
            Expr::Neg(e) | Expr::Call(_, e) | Expr::Pow(e, _) => e.coords_used(f),
            Expr::Binary(_, a, b) => {
                a.coords_used(f);
                b.coords_used(f);
            }
        }
    }
}
