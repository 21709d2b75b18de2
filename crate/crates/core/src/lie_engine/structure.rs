use super::fields::{field_frame, FieldFrame, FieldKind};
use crate::error::{Error, Result};
use crate::group_model::LieGroup;
use crate::sampling;

/// Structure constants `C^c_{ab}` with `[X_a, X_b] = C^c_{ab} X_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTable {
    pub labels: Vec<String>,
    data: Vec<f64>,
}

/// One component of a Jacobi residual: `J^d_{abc}` for `a < b < c`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiEntry {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub value: f64,
}

impl StructureTable {
    pub fn zeros(labels: Vec<String>) -> Self {
        let n = labels.len();
        StructureTable {
            labels,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    fn idx(&self, a: usize, b: usize, c: usize) -> usize {
        let n = self.dim();
        (a * n + b) * n + c
    }

    /// `C^c_{ab}`.
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[self.idx(a, b, c)]
    }

    /// Sets `C^c_{ab} = v` and `C^c_{ba} = −v`.
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        let i = self.idx(a, b, c);
        let j = self.idx(b, a, c);
        self.data[i] = v;
        self.data[j] = if a == b { 0.0 } else { -v };
    }

    pub fn label_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Argument(format!("no generator '{label}' in table")))
    }

    /// `C^c_{ab}` by label.
    pub fn entry(&self, a: &str, b: &str, c: &str) -> Result<f64> {
        Ok(self.get(
            self.label_index(a)?,
            self.label_index(b)?,
            self.label_index(c)?,
        ))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Entrywise negation (the left-field table of a right-field table).
    pub fn negated(&self) -> Self {
        StructureTable {
            labels: self.labels.clone(),
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn max_diff(&self, other: &StructureTable) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    }

    /// Re-expresses the table in the basis `X̃_a = s_a X_a`, so that
    /// `C̃^c_{ab} = s_a s_b C^c_{ab} / s_c`.
    pub fn rescaled(&self, scales: &[f64]) -> Self {
        let n = self.dim();
        let mut out = StructureTable::zeros(self.labels.clone());
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let i = out.idx(a, b, c);
                    out.data[i] = scales[a] * scales[b] * self.get(a, b, c) / scales[c];
                }
            }
        }
        out
    }

    /// Nonzero entries as `(a, b, c, value)` with `a < b`.
    pub fn nonzero(&self, tol: f64) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in 0..n {
                    let v = self.get(a, b, c);
                    if v.abs() > tol {
                        out.push((a, b, c, v));
                    }
                }
            }
        }
        out
    }

    /// All `J^d_{abc} = Σ_e (C^e_{ab} C^d_{ec} + C^e_{bc} C^d_{ea} + C^e_{ca} C^d_{eb})`
    /// for `a < b < c`.
    pub fn jacobi_residuals(&self) -> Vec<JacobiEntry> {
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in 0..n {
                        let value = (0..n)
                            .map(|e| {
                                self.get(a, b, e) * self.get(e, c, d)
                                    + self.get(b, c, e) * self.get(e, a, d)
                                    + self.get(c, a, e) * self.get(e, b, d)
                            })
                            .sum();
                        out.push(JacobiEntry { a, b, c, d, value });
                    }
                }
            }
        }
        out
    }

    pub fn max_jacobi_residual(&self) -> f64 {
        self.jacobi_residuals()
            .iter()
            .fold(0.0f64, |m, e| m.max(e.value.abs()))
    }
}

/// Table read off at the identity from fields of one kind:
/// `C^c_{ab} = ∂_a X_{b,c} − ∂_b X_{a,c}` at `e`.
pub fn table_at_identity(group: &LieGroup, kind: FieldKind) -> Result<StructureTable> {
    let frame = field_frame(group, kind, &group.identity())?;
    Ok(table_from_identity_frame(group, &frame))
}

fn table_from_identity_frame(group: &LieGroup, frame: &FieldFrame) -> StructureTable {
    let n = group.dim();
    let mut t = StructureTable::zeros(group.labels().to_vec());
    for a in 0..n {
        for b in a + 1..n {
            for c in 0..n {
                t.set(a, b, c, frame.derivs[b][c][a] - frame.derivs[a][c][b]);
            }
        }
    }
    t
}

/// Largest deviation of `[X_a, X_b](g)` from `C^c_{ab} X_c(g)` over seeded
/// sample points, relative to the size of the fields involved.
pub fn closure_residual(
    group: &LieGroup,
    table: &StructureTable,
    points: usize,
    seed: u64,
) -> Result<f64> {
    let n = group.dim();
    let mut rng = sampling::rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let g = group.sample(&mut rng);
        let frame = field_frame(group, FieldKind::Right, &g)?;
        for a in 0..n {
            for b in a + 1..n {
                let br = frame.bracket(a, b);
                for i in 0..n {
                    let mut expect = 0.0;
                    let mut scale = 1.0f64;
                    for c in 0..n {
                        let term = table.get(a, b, c) * frame.values[c][i];
                        expect += term;
                        scale = scale.max(term.abs());
                    }
                    worst = worst.max((br[i] - expect).abs() / scale);
                }
            }
        }
    }
    Ok(worst)
}

pub const CLOSURE_TOL: f64 = 1e-8;
const CLOSURE_POINTS: usize = 3;
const CLOSURE_SEED: u64 = 0xc105e;

/// Right-field structure constants, checked for closure at sample points.
pub fn structure_constants(group: &LieGroup) -> Result<StructureTable> {
    let table = table_at_identity(group, FieldKind::Right)?;
    let r = closure_residual(group, &table, CLOSURE_POINTS, CLOSURE_SEED)?;
    if !(r <= CLOSURE_TOL) {
        return Err(Error::Numeric {
            message: format!(
                "right fields of {} are not closed under the structure constants read at the identity",
                group.name()
            ),
            residual: r,
        });
    }
    Ok(table)
}
