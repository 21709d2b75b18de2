use super::expr::{BinOp, Expr, Func, NameContext};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Prime,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '\'' => Some(Tok::Prime),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, line, col });
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit: String = chars[start..i].iter().collect();
            let value: f64 = lit
                .parse()
                .map_err(|_| Error::parse(line, col, format!("malformed number '{lit}'")))?;
            out.push(Token {
                tok: Tok::Num(value, lit),
                line,
                col,
            });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line,
                col,
            });
        } else {
            return Err(Error::parse(
                line,
                col,
                format!("unexpected character '{c}'"),
            ));
        }
    }
    out.push(Token {
        tok: Tok::End,
        line,
        col: col0 + chars.len(),
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    ctx: &'a NameContext,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, tok: &Token, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(tok.line, tok.col, msg))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.power()?)));
        }
        self.power()
    }

    /// `base ("^" INT)*`, folded right-associatively into one exponent.
    fn power(&mut self) -> Result<Expr> {
        let base = self.base()?;
        let mut exps = Vec::new();
        while self.peek().tok == Tok::Caret {
            self.bump();
            let t = self.bump();
            match &t.tok {
                Tok::Num(_, text) if text.chars().all(|c| c.is_ascii_digit()) => {
                    let n: u32 = text
                        .parse()
                        .or_else(|_| self.err(&t, "exponent too large"))?;
                    exps.push(n);
                }
                _ => return self.err(&t, "exponent must be a non-negative integer literal"),
            }
        }
        let Some(mut e) = exps.pop() else {
            return Ok(base);
        };
        while let Some(b) = exps.pop() {
            e = b.checked_pow(e).ok_or_else(|| {
                let t = self.peek().clone();
                Error::parse(t.line, t.col, "exponent too large")
            })?;
        }
        Ok(Expr::Pow(Box::new(base), e))
    }

    fn base(&mut self) -> Result<Expr> {
        let t = self.bump();
        match &t.tok {
            Tok::Num(v, text) => Ok(Expr::Num {
                value: *v,
                text: text.clone(),
            }),
            Tok::LParen => {
                let e = self.expr()?;
                let close = self.bump();
                if close.tok != Tok::RParen {
                    return self.err(&close, "expected ')'");
                }
                Ok(e)
            }
            Tok::Ident(name) => self.ident(&t, name),
            Tok::End => self.err(&t, "unexpected end of expression"),
            other => self.err(&t, format!("unexpected token {other:?}")),
        }
    }

    fn ident(&mut self, t: &Token, name: &str) -> Result<Expr> {
        if let Some(func) = Func::from_name(name) {
            let open = self.bump();
            if open.tok != Tok::LParen {
                return self.err(
                    &open,
                    format!("function '{name}' takes one argument in parentheses"),
                );
            }
            let arg = self.expr()?;
            let close = self.bump();
            if close.tok != Tok::RParen {
                return self.err(
                    &close,
                    format!("function '{name}' takes exactly one argument; expected ')'"),
                );
            }
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        if self.peek().tok == Tok::LParen {
            return self.err(t, format!("unknown function '{name}'"));
        }
        let primed = if self.peek().tok == Tok::Prime {
            self.bump();
            true
        } else {
            false
        };
        if let Some(index) = self.ctx.coords.iter().position(|c| c == name) {
            if primed && !self.ctx.allow_primed {
                return self.err(t, format!("primed coordinate '{name}'' not allowed here"));
            }
            return Ok(Expr::Coord { index, primed });
        }
        if let Some(i) = self.ctx.params.iter().position(|p| p == name) {
            if primed {
                return self.err(t, format!("parameter '{name}' cannot be primed"));
            }
            return Ok(Expr::Param(i));
        }
        self.err(t, format!("unknown identifier '{name}'"))
    }
}

/// Parses `text` against the names in `ctx`.
pub fn parse_expression(text: &str, ctx: &NameContext) -> Result<Expr> {
    parse_expression_at(text, ctx, 1, 1)
}

/// As [`parse_expression`], reporting positions relative to `line` and the
/// starting column `col`.
pub fn parse_expression_at(text: &str, ctx: &NameContext, line: usize, col: usize) -> Result<Expr> {
    let toks = lex(text, line, col)?;
    if toks.len() == 1 {
        return Err(Error::parse(line, col, "empty expression"));
    }
    let mut p = Parser { toks, pos: 0, ctx };
    let e = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return p.err(&t, format!("unexpected trailing token {:?}", t.tok));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn galilei_ctx() -> NameContext {
        NameContext::new(&["t", "x", "v", "phi"], &["m", "hbar"], true)
    }

    #[test]
    fn precedence_and_sides() {
        let ctx = galilei_ctx();
        let e = parse_expression("v' + v", &ctx).unwrap();
        assert_eq!(
            e,
            Expr::Binary(
                BinOp::Add,
                Box::new(Expr::Coord {
                    index: 2,
                    primed: true
                }),
                Box::new(Expr::Coord {
                    index: 2,
                    primed: false
                })
            )
        );
        let e = parse_expression("-x^2", &ctx).unwrap();
        assert!(matches!(e, Expr::Neg(ref inner) if matches!(**inner, Expr::Pow(_, 2))));
        let e = parse_expression("2^3^2", &ctx).unwrap();
        assert_eq!(e.eval::<f64>(&[], &[], &[]).unwrap(), 512.0);
    }

    #[test]
    fn error_positions() {
        let ctx = galilei_ctx();
        match parse_expression("sin(q", &ctx) {
            Err(Error::Parse {
                line: 1, column, ..
            }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        match parse_expression("sin(t", &ctx) {
            Err(Error::Parse {
                column, message, ..
            }) => {
                assert_eq!(column, 6);
                assert!(message.contains("')'"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_expression("m'", &ctx).is_err());
        assert!(parse_expression("foo(t)", &ctx).is_err());
        assert!(parse_expression("sin t", &ctx).is_err());
        assert!(parse_expression("t $ x", &ctx).is_err());
        assert!(parse_expression("x^1.5", &ctx).is_err());
        let noprime = NameContext::new(&["t"], &[], false);
        assert!(parse_expression("t'", &noprime).is_err());
    }

    #[test]
    fn scientific_literals() {
        let ctx = galilei_ctx();
        let e = parse_expression("1.5e-3*t + 2E2", &ctx).unwrap();
        assert_eq!(
            e.eval::<f64>(&[], &[2.0, 0.0, 0.0, 0.0], &[1.0, 1.0])
                .unwrap(),
            200.003
        );
    }
}
