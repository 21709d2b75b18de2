//! Multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::grouplang::{BinOp, Expr};
use crate::jetcalc::Scalar;

/// A polynomial over a fixed list of variables; monomials are exponent
/// vectors, zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Poly::constant(nvars, BigRational::from_integer(BigInt::from(c)))
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        let mut p = Poly::zero(nvars);
        p.add_term(e, BigRational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, exps: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::from_int(self.nvars, 1);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// The constant value if the polynomial has no variable terms.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(e, _)| e.iter().all(|&x| x == 0))
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    /// Replaces variable `index` by `value` exactly.
    pub fn substitute(&self, index: usize, value: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        let mut powers: Vec<Poly> = vec![Poly::from_int(self.nvars, 1)];
        for (e, c) in &self.terms {
            let k = e[index] as usize;
            while powers.len() <= k {
                let next = powers.last().expect("nonempty").mul(value);
                powers.push(next);
            }
            let mut rest = e.clone();
            rest[index] = 0;
            let mut mono = Poly::zero(self.nvars);
            mono.add_term(rest, c.clone());
            out = out.add(&mono.mul(&powers[k]));
        }
        out
    }

    pub fn derivative(&self, index: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[index] > 0 {
                let mut d = e.clone();
                d[index] -= 1;
                out.add_term(d, c * BigRational::from_integer(BigInt::from(e[index])));
            }
        }
        out
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Evaluates over any scalar carrier, e.g. jets.
    pub fn eval_scalar<S: Scalar>(&self, values: &[S]) -> Result<S> {
        let mut acc = S::constant(0.0);
        for (e, c) in &self.terms {
            let mut t = S::constant(c.to_f64().unwrap_or(f64::NAN));
            for (v, &k) in values.iter().zip(e) {
                if k > 0 {
                    t = t * v.clone().try_powi(k as i32)?;
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (v, &k) in values.iter().zip(e) {
                    t *= v.powi(k as i32);
                }
                t
            })
            .sum()
    }

    /// Converts a parsed expression over parameters into a polynomial.
    /// Division is allowed only by nonzero constants.
    pub fn from_expr(expr: &Expr, nvars: usize) -> Result<Poly> {
        Ok(match expr {
            Expr::Num { text, .. } => Poly::constant(nvars, parse_decimal(text)?),
            Expr::Param(i) => Poly::var(nvars, *i),
            Expr::Coord { .. } => {
                return Err(Error::Validation(
                    "structure polynomials may only use parameters".into(),
                ))
            }
            Expr::Neg(e) => Poly::from_expr(e, nvars)?.neg(),
            Expr::Binary(op, a, b) => {
                let x = Poly::from_expr(a, nvars)?;
                let y = Poly::from_expr(b, nvars)?;
                match op {
                    BinOp::Add => x.add(&y),
                    BinOp::Sub => x.sub(&y),
                    BinOp::Mul => x.mul(&y),
                    BinOp::Div => match y.as_constant() {
                        Some(c) if !c.is_zero() => x.scale(&c.recip()),
                        _ => {
                            return Err(Error::Validation(
                                "polynomial division is only by nonzero constants".into(),
                            ))
                        }
                    },
                }
            }
            Expr::Call(f, _) => {
                return Err(Error::Validation(format!(
                    "function {} is not allowed in a polynomial",
                    f.name()
                )))
            }
            Expr::Pow(b, n) => Poly::from_expr(b, nvars)?.pow(*n),
        })
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

/// Exact rational value of a decimal literal such as `1.25e-3`.
pub fn parse_decimal(text: &str) -> Result<BigRational> {
    let bad = || Error::Validation(format!("malformed number '{text}'"));
    let (mant, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let n = BigInt::parse_bytes(digits.as_bytes(), 10).ok_or_else(bad)?;
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let p = num::pow(ten, shift.unsigned_abs() as usize);
    Ok(if shift >= 0 {
        BigRational::from_integer(n * p)
    } else {
        BigRational::new(n, p)
    })
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        // Highest total degree first, then by exponent vector.
        let mut terms: Vec<_> = self.poly.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| {
                    let name = self.names.get(i).map(String::as_str).unwrap_or("?");
                    if p == 1 {
                        name.to_string()
                    } else {
                        format!("{name}^{p}")
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{mag}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse_decimal("0.25").unwrap(), r(1, 4));
        assert_eq!(parse_decimal("1e-3").unwrap(), r(1, 1000));
        assert_eq!(parse_decimal("2.5E2").unwrap(), r(250, 1));
        assert!(parse_decimal("1.2.3").is_err());
    }

    #[test]
    fn substitution_cancels_exactly() {
        // g - m*c with g := m*c
        let m = Poly::var(3, 0);
        let c = Poly::var(3, 1);
        let g = Poly::var(3, 2);
        let mc = m.mul(&c);
        let p = g.sub(&mc);
        assert!(p.substitute(2, &mc).is_zero());
        let q = p.substitute(2, &mc.scale(&r(2, 1)));
        assert_eq!(q, mc);
    }

    #[test]
    fn square_expands() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let s = x.add(&y).pow(2);
        let names = vec!["x".to_string(), "y".to_string()];
        assert_eq!(s.display(&names).to_string(), "x^2 + 2*x*y + y^2");
    }
}
