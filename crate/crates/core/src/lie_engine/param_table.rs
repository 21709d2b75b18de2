use std::collections::BTreeMap;

use super::poly::Poly;
use super::structure::StructureTable;
use crate::error::{Error, Result};
use crate::grouplang::{parse_expression_at, NameContext};

/// Structure constants whose entries are polynomials in named parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamStructureTable {
    pub labels: Vec<String>,
    pub params: Vec<String>,
    pub central: Option<String>,
    data: Vec<Poly>,
}

/// A Jacobi residual component `J^d_{abc}` that is not identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamJacobiEntry {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub poly: Poly,
}

impl ParamStructureTable {
    pub fn zeros(labels: Vec<String>, params: Vec<String>) -> Self {
        let n = labels.len();
        let np = params.len();
        ParamStructureTable {
            labels,
            params,
            central: None,
            data: vec![Poly::zero(np); n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    fn idx(&self, a: usize, b: usize, c: usize) -> usize {
        let n = self.dim();
        (a * n + b) * n + c
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> &Poly {
        &self.data[self.idx(a, b, c)]
    }

    /// Sets `C^c_{ab}` and its antisymmetric partner.
    pub fn set(&mut self, a: usize, b: usize, c: usize, p: Poly) -> Result<()> {
        if a == b {
            if p.is_zero() {
                return Ok(());
            }
            return Err(Error::Validation(format!(
                "C[{0},{0},{1}] must vanish by antisymmetry",
                self.labels[a], self.labels[c]
            )));
        }
        let j = self.idx(b, a, c);
        self.data[j] = p.neg();
        let i = self.idx(a, b, c);
        self.data[i] = p;
        Ok(())
    }

    pub fn label_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Argument(format!("no generator '{label}' in table")))
    }

    pub fn param_index(&self, name: &str) -> Result<usize> {
        self.params
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::Argument(format!("no parameter '{name}' in table")))
    }

    /// Jacobi residual components that do not vanish identically.
    pub fn jacobi_residuals(&self) -> Vec<ParamJacobiEntry> {
        let n = self.dim();
        let np = self.params.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in 0..n {
                        let mut acc = Poly::zero(np);
                        for e in 0..n {
                            for (x, y) in [
                                (self.get(a, b, e), self.get(e, c, d)),
                                (self.get(b, c, e), self.get(e, a, d)),
                                (self.get(c, a, e), self.get(e, b, d)),
                            ] {
                                if !x.is_zero() && !y.is_zero() {
                                    acc = acc.add(&x.mul(y));
                                }
                            }
                        }
                        if !acc.is_zero() {
                            out.push(ParamJacobiEntry {
                                a,
                                b,
                                c,
                                d,
                                poly: acc,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Replaces parameter `name` everywhere by `value`.
    pub fn substitute(&self, name: &str, value: &Poly) -> Result<Self> {
        let k = self.param_index(name)?;
        let mut out = self.clone();
        for p in &mut out.data {
            *p = p.substitute(k, value);
        }
        Ok(out)
    }

    /// Parses a polynomial over this table's parameters.
    pub fn parse_poly(&self, text: &str) -> Result<Poly> {
        let names: Vec<&str> = self.params.iter().map(String::as_str).collect();
        let ctx = NameContext::new(&[], &names, false);
        let e = parse_expression_at(text, &ctx, 1, 1)?;
        Poly::from_expr(&e, self.params.len())
    }

    /// Numeric table at the given parameter values.
    pub fn evaluate(&self, values: &BTreeMap<String, f64>) -> Result<StructureTable> {
        let v: Vec<f64> = self
            .params
            .iter()
            .map(|p| {
                values
                    .get(p)
                    .copied()
                    .ok_or_else(|| Error::Argument(format!("no value for parameter '{p}'")))
            })
            .collect::<Result<_>>()?;
        let n = self.dim();
        let mut t = StructureTable::zeros(self.labels.clone());
        for a in 0..n {
            for b in a + 1..n {
                for c in 0..n {
                    t.set(a, b, c, self.get(a, b, c).eval(&v));
                }
            }
        }
        Ok(t)
    }

    /// `"[a,b,c] = poly"` descriptions of the given residuals.
    pub fn describe(&self, entries: &[ParamJacobiEntry]) -> Vec<String> {
        entries
            .iter()
            .map(|e| {
                format!(
                    "J[{},{},{}]^{} = {}",
                    self.labels[e.a],
                    self.labels[e.b],
                    self.labels[e.c],
                    self.labels[e.d],
                    e.poly.display(&self.params)
                )
            })
            .collect()
    }
}

/// Parses the parameterized algebra format:
///
/// ```text
/// generators t x v phi
/// params m
/// central phi
/// C[x,v,phi] = -m
/// ```
///
/// `C[a,b,c] = POLY` sets `C^c_{ab}`; unlisted entries are zero and the
/// `(b,a)` entry is filled in by antisymmetry.
pub fn parse_param_table(text: &str) -> Result<ParamStructureTable> {
    let mut labels: Option<Vec<String>> = None;
    let mut params: Vec<String> = Vec::new();
    let mut central: Option<String> = None;
    let mut table: Option<ParamStructureTable> = None;
    let mut seen: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();

    for (k, raw) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("C[") {
            let t = match table.as_mut() {
                Some(t) => t,
                None => {
                    let ls = labels.clone().ok_or_else(|| {
                        Error::parse(lineno, 1, "'generators' must precede entries")
                    })?;
                    table = Some(ParamStructureTable::zeros(ls, params.clone()));
                    table.as_mut().expect("just set")
                }
            };
            let close = rest
                .find(']')
                .ok_or_else(|| Error::parse(lineno, 1, "missing ']' in entry"))?;
            let idx: Vec<&str> = rest[..close].split(',').map(str::trim).collect();
            if idx.len() != 3 {
                return Err(Error::parse(lineno, 3, "entry needs three labels C[a,b,c]"));
            }
            let pos: Vec<usize> = idx
                .iter()
                .map(|l| {
                    t.label_index(l)
                        .map_err(|_| Error::parse(lineno, 3, format!("unknown generator '{l}'")))
                })
                .collect::<Result<_>>()?;
            let after = rest[close + 1..].trim_start();
            let expr = after
                .strip_prefix('=')
                .ok_or_else(|| Error::parse(lineno, close + 4, "expected '=' after entry"))?;
            let col = raw.find('=').map(|i| i + 2).unwrap_or(1);
            let names: Vec<&str> = t.params.iter().map(String::as_str).collect();
            let ctx = NameContext::new(&[], &names, false);
            let e = parse_expression_at(expr.trim(), &ctx, lineno, col)?;
            let poly = Poly::from_expr(&e, t.params.len())
                .map_err(|err| Error::parse(lineno, col, err.to_string()))?;
            let (a, b, c) = (pos[0], pos[1], pos[2]);
            let key = if a < b { (a, b, c) } else { (b, a, c) };
            if let Some(prev) = seen.insert(key, lineno) {
                return Err(Error::parse(
                    lineno,
                    1,
                    format!("entry duplicates line {prev} (antisymmetric partner included)"),
                ));
            }
            t.set(a, b, c, poly)
                .map_err(|err| Error::parse(lineno, 1, err.to_string()))?;
            continue;
        }
        let mut words = line.split_whitespace();
        let head = words.next().unwrap_or("");
        let rest: Vec<String> = words.map(str::to_string).collect();
        if table.is_some() {
            return Err(Error::parse(lineno, 1, "header lines must precede entries"));
        }
        match head {
            "generators" => {
                if rest.is_empty() {
                    return Err(Error::parse(lineno, 1, "'generators' needs names"));
                }
                labels = Some(rest);
            }
            "params" => params = rest,
            "central" => {
                if rest.len() != 1 {
                    return Err(Error::parse(lineno, 1, "expected 'central NAME'"));
                }
                central = Some(rest[0].clone());
            }
            other => {
                return Err(Error::parse(
                    lineno,
                    1,
                    format!("unknown directive '{other}'"),
                ));
            }
        }
    }
    let mut t = match table {
        Some(t) => t,
        None => ParamStructureTable::zeros(
            labels.ok_or_else(|| Error::parse(1, 1, "missing 'generators' line"))?,
            params,
        ),
    };
    if let Some(c) = &central {
        t.label_index(c)
            .map_err(|_| Error::Validation(format!("central generator '{c}' is not declared")))?;
    }
    t.central = central;
    Ok(t)
}

/// The gravity-coupled algebra exactly as printed, plain and contracted
/// terms together, with `m`, `c` and `g` independent.
pub const GRAVITY_FULL_TABLE: &str = "\
generators t x v h00 h0x hxx phi
params m c g
central phi
C[v,x,t] = -1
C[v,x,phi] = m*c
C[t,h0x,x] = 1
C[v,t,x] = -1
C[x,h0x,t] = -1
C[x,h0x,phi] = -g
C[v,h00,h0x] = -1
C[x,hxx,x] = -1
C[h00,h0x,v] = 1
C[v,hxx,h0x] = 1
C[h0x,hxx,v] = 1
C[t,h00,t] = 1
C[t,h00,phi] = g
C[v,h0x,h00] = -1
C[v,h0x,hxx] = 1
";

/// Only the terms that survive the non-relativistic contraction.
pub const GRAVITY_CONTRACTED_TABLE: &str = "\
generators t x v h00 h0x hxx phi
params m c g
central phi
C[v,x,phi] = m*c
C[t,h0x,x] = 1
C[v,t,x] = -1
C[x,h0x,phi] = -g
C[t,h00,phi] = g
";

/// Outcome of testing the gravity coupling against `g = k·m·c`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    /// Residuals with independent parameters.
    pub free: Vec<String>,
    /// Residuals remaining after `g := m*c`.
    pub at_mc: Vec<String>,
    /// Residuals remaining after `g := 2*m*c`.
    pub at_2mc: Vec<String>,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        !self.free.is_empty() && self.at_mc.is_empty() && !self.at_2mc.is_empty()
    }
}

pub fn equivalence_check(table: &ParamStructureTable) -> Result<EquivalenceReport> {
    let mc = table.parse_poly("m*c")?;
    let two_mc = table.parse_poly("2*m*c")?;
    let free = table.jacobi_residuals();
    let at_mc = table.substitute("g", &mc)?;
    let at_2mc = table.substitute("g", &two_mc)?;
    Ok(EquivalenceReport {
        free: table.describe(&free),
        at_mc: at_mc.describe(&at_mc.jacobi_residuals()),
        at_2mc: at_2mc.describe(&at_2mc.jacobi_residuals()),
    })
}
