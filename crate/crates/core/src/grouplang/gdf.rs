use super::expr::{Expr, NameContext};
use super::parser::parse_expression_at;
use crate::error::{Error, Result};
use crate::jetcalc::Scalar;
use crate::sampling;

/// A group law in chart coordinates, as declared in a GDF file.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDefinition {
    pub name: String,
    /// Parameter names with default values, in declaration order.
    pub params: Vec<(String, f64)>,
    pub coords: Vec<String>,
    /// Index of the U(1) phase coordinate.
    pub central: usize,
    pub identity: Vec<f64>,
    /// One composition expression per coordinate.
    pub law: Vec<Expr>,
    pub inverse: Option<Vec<Expr>>,
    /// Coordinate along which characteristic flows are parameterized.
    pub time: Option<usize>,
    /// Coordinate groups sampled jointly from the unit ball.
    pub balls: Vec<Vec<usize>>,
}

const IDENTITY_CHECK_POINTS: usize = 16;
const IDENTITY_CHECK_TOL: f64 = 1e-10;
const IDENTITY_CHECK_SEED: u64 = 0x1d_e7_17;

impl GroupDefinition {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn law_context(&self) -> NameContext {
        NameContext {
            coords: self.coords.clone(),
            params: self.params.iter().map(|(n, _)| n.clone()).collect(),
            allow_primed: true,
        }
    }

    pub fn default_params(&self) -> Vec<f64> {
        self.params.iter().map(|(_, v)| *v).collect()
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn compose<S: Scalar>(&self, left: &[S], right: &[S], params: &[f64]) -> Result<Vec<S>> {
        self.law
            .iter()
            .map(|e| e.eval(left, right, params))
            .collect()
    }

    pub fn eval_inverse<S: Scalar>(&self, g: &[S], params: &[f64]) -> Option<Result<Vec<S>>> {
        self.inverse
            .as_ref()
            .map(|inv| inv.iter().map(|e| e.eval(&[], g, params)).collect())
    }

    /// Largest deviation of `e∘g` and `g∘e` from `g` over seeded sample points.
    pub fn identity_residual(&self, params: &[f64]) -> Result<f64> {
        let mut rng = sampling::rng(IDENTITY_CHECK_SEED);
        let mut worst = 0.0f64;
        for _ in 0..IDENTITY_CHECK_POINTS {
            let g = sampling::chart_point(&mut rng, self.dim(), &self.balls);
            let left = self.compose(&self.identity, &g, params)?;
            let right = self.compose(&g, &self.identity, params)?;
            for i in 0..self.dim() {
                worst = worst
                    .max((left[i] - g[i]).abs())
                    .max((right[i] - g[i]).abs());
            }
        }
        Ok(worst)
    }

    pub fn validate_identity(&self, params: &[f64]) -> Result<()> {
        let r = self.identity_residual(params)?;
        if r > IDENTITY_CHECK_TOL || r.is_nan() {
            return Err(Error::Validation(format!(
                "not a group law at identity (residual {r:.3e} over {IDENTITY_CHECK_POINTS} points)"
            )));
        }
        Ok(())
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

#[derive(PartialEq)]
enum Section {
    Header,
    Law,
    Inverse,
}

/// Parses and validates a GDF document.
pub fn parse_group_file(text: &str) -> Result<GroupDefinition> {
    let mut name: Option<String> = None;
    let mut params: Vec<(String, f64)> = Vec::new();
    let mut coords: Option<Vec<String>> = None;
    let mut central: Option<(String, usize)> = None;
    let mut identity: Option<(Vec<f64>, usize)> = None;
    let mut time: Option<(String, usize)> = None;
    let mut balls: Vec<(Vec<String>, usize)> = Vec::new();
    let mut law_lines: Vec<(usize, String)> = Vec::new();
    let mut inverse_lines: Vec<(usize, String)> = Vec::new();
    let mut saw_law = false;
    let mut saw_inverse = false;
    let mut section = Section::Header;

    for (k, raw) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = strip_comment(raw).trim_end();
        if line.trim().is_empty() {
            continue;
        }
        let trimmed = line.trim();
        if trimmed == "law:" {
            if saw_law {
                return Err(Error::parse(lineno, 1, "duplicate 'law:' section"));
            }
            saw_law = true;
            section = Section::Law;
            continue;
        }
        if trimmed == "inverse:" {
            if saw_inverse {
                return Err(Error::parse(lineno, 1, "duplicate 'inverse:' section"));
            }
            saw_inverse = true;
            section = Section::Inverse;
            continue;
        }
        let mut words = trimmed.split_whitespace();
        let head = words.next().unwrap_or("");
        let rest: Vec<&str> = words.collect();
        let is_directive = matches!(
            head,
            "group" | "params" | "coords" | "central" | "identity" | "time" | "ball"
        );
        if section != Section::Header && !is_directive {
            match section {
                Section::Law => law_lines.push((lineno, line.to_string())),
                Section::Inverse => inverse_lines.push((lineno, line.to_string())),
                Section::Header => unreachable!(),
            }
            continue;
        }
        section = Section::Header;
        if name.is_none() && head != "group" {
            return Err(Error::parse(lineno, 1, "first line must be 'group NAME'"));
        }
        match head {
            "group" => {
                if name.is_some() {
                    return Err(Error::parse(lineno, 1, "duplicate 'group' line"));
                }
                if rest.len() != 1 {
                    return Err(Error::parse(lineno, 1, "expected 'group NAME'"));
                }
                name = Some(rest[0].to_string());
            }
            "params" => {
                for item in rest {
                    let (n, v) = item.split_once('=').ok_or_else(|| {
                        Error::parse(lineno, 1, format!("parameter '{item}' must be NAME=NUMBER"))
                    })?;
                    let v: f64 = v.parse().map_err(|_| {
                        Error::parse(
                            lineno,
                            1,
                            format!("parameter '{n}' has non-numeric value '{v}'"),
                        )
                    })?;
                    if params.iter().any(|(p, _)| p == n) {
                        return Err(Error::parse(
                            lineno,
                            1,
                            format!("duplicate parameter '{n}'"),
                        ));
                    }
                    params.push((n.to_string(), v));
                }
            }
            "coords" => {
                if coords.is_some() {
                    return Err(Error::parse(lineno, 1, "duplicate 'coords' line"));
                }
                let mut cs: Vec<String> = Vec::new();
                for c in rest {
                    if cs.iter().any(|x| x == c) {
                        return Err(Error::parse(
                            lineno,
                            1,
                            format!("duplicate coordinate '{c}'"),
                        ));
                    }
                    cs.push(c.to_string());
                }
                if cs.is_empty() {
                    return Err(Error::parse(lineno, 1, "'coords' needs at least one name"));
                }
                coords = Some(cs);
            }
            "central" => {
                if rest.len() != 1 {
                    return Err(Error::parse(lineno, 1, "expected 'central NAME'"));
                }
                central = Some((rest[0].to_string(), lineno));
            }
            "time" => {
                if rest.len() != 1 {
                    return Err(Error::parse(lineno, 1, "expected 'time NAME'"));
                }
                time = Some((rest[0].to_string(), lineno));
            }
            "ball" => {
                if rest.is_empty() {
                    return Err(Error::parse(lineno, 1, "expected 'ball NAME+'"));
                }
                balls.push((rest.iter().map(|s| s.to_string()).collect(), lineno));
            }
            "identity" => {
                let vals = rest
                    .iter()
                    .map(|s| {
                        s.parse::<f64>().map_err(|_| {
                            Error::parse(lineno, 1, format!("identity entry '{s}' is not a number"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                identity = Some((vals, lineno));
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

    let name = name.ok_or_else(|| Error::parse(1, 1, "missing 'group NAME' line"))?;
    let coords = coords.ok_or_else(|| Error::parse(1, 1, "missing 'coords' line"))?;
    let n = coords.len();
    let lookup = |c: &str, lineno: usize, what: &str| -> Result<usize> {
        coords.iter().position(|x| x == c).ok_or_else(|| {
            Error::parse(
                lineno,
                1,
                format!("{what} coordinate '{c}' is not declared"),
            )
        })
    };
    for c in &coords {
        if params.iter().any(|(p, _)| p == c) {
            return Err(Error::Validation(format!(
                "'{c}' declared as both coordinate and parameter"
            )));
        }
    }
    let (central_name, central_line) =
        central.ok_or_else(|| Error::parse(1, 1, "missing 'central' line"))?;
    let central = lookup(&central_name, central_line, "central")?;
    let (identity, id_line) =
        identity.ok_or_else(|| Error::parse(1, 1, "missing 'identity' line"))?;
    if identity.len() != n {
        return Err(Error::parse(
            id_line,
            1,
            format!(
                "identity has {} entries for {n} coordinates",
                identity.len()
            ),
        ));
    }
    let time = match time {
        Some((t, l)) => Some(lookup(&t, l, "time")?),
        None => None,
    };
    let balls = balls
        .into_iter()
        .map(|(names, l)| {
            names
                .iter()
                .map(|c| lookup(c, l, "ball"))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if !saw_law {
        return Err(Error::parse(1, 1, "missing 'law:' section"));
    }
    if law_lines.is_empty() {
        return Err(Error::parse(1, 1, "empty 'law:' section"));
    }

    let mut def = GroupDefinition {
        name,
        params,
        coords,
        central,
        identity,
        law: Vec::new(),
        inverse: None,
        time,
        balls,
    };
    def.law = parse_assignments(&def, &law_lines, "''", true, "law")?;
    if saw_inverse {
        if inverse_lines.is_empty() {
            return Err(Error::parse(1, 1, "empty 'inverse:' section"));
        }
        def.inverse = Some(parse_assignments(
            &def,
            &inverse_lines,
            "^-1",
            false,
            "inverse",
        )?);
    }
    def.validate_identity(&def.default_params())?;
    Ok(def)
}

/// Parses lines `NAME<suffix> = EXPR`, one per coordinate in any order.
fn parse_assignments(
    def: &GroupDefinition,
    lines: &[(usize, String)],
    suffix: &str,
    allow_primed: bool,
    section: &str,
) -> Result<Vec<Expr>> {
    let mut ctx = def.law_context();
    ctx.allow_primed = allow_primed;
    let mut slots: Vec<Option<Expr>> = vec![None; def.dim()];
    for (lineno, line) in lines {
        let eq = line
            .find('=')
            .ok_or_else(|| Error::parse(*lineno, 1, format!("expected 'NAME{suffix} = EXPR'")))?;
        let lhs = line[..eq].trim();
        let target = lhs.strip_suffix(suffix).ok_or_else(|| {
            Error::parse(
                *lineno,
                1,
                format!("left-hand side '{lhs}' must be written NAME{suffix}"),
            )
        })?;
        let idx = def.coord_index(target.trim()).ok_or_else(|| {
            Error::parse(
                *lineno,
                1,
                format!("{section} entry for undeclared coordinate '{target}'"),
            )
        })?;
        if slots[idx].is_some() {
            return Err(Error::parse(
                *lineno,
                1,
                format!("duplicate {section} entry for '{target}'"),
            ));
        }
        let rhs = &line[eq + 1..];
        let col = line[..eq + 1].chars().count() + 1;
        slots[idx] = Some(parse_expression_at(rhs, &ctx, *lineno, col)?);
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            s.ok_or_else(|| {
                Error::parse(
                    1,
                    1,
                    format!("{section} section has no entry for '{}'", def.coords[i]),
                )
            })
        })
        .collect()
}
