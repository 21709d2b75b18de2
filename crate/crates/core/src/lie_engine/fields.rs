use crate::error::{Error, Result};
use crate::group_model::LieGroup;
use crate::jetcalc::Jet2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// Generators of right translations: `∂(g h)/∂h` at `h = e`.
    Left,
    /// Generators of left translations: `∂(h g)/∂h` at `h = e`.
    Right,
}

/// All invariant fields of one kind at a point, with their first
/// derivatives.
#[derive(Debug, Clone)]
pub struct FieldFrame {
    /// `values[b][i]`: component `i` of field `b`.
    pub values: Vec<Vec<f64>>,
    /// `derivs[b][i][j]`: `∂_j` of component `i` of field `b`.
    pub derivs: Vec<Vec<Vec<f64>>>,
}

impl FieldFrame {
    /// Components of `[X_a, X_b]` at the frame's point.
    pub fn bracket(&self, a: usize, b: usize) -> Vec<f64> {
        bracket_components(
            &self.values[a],
            &self.derivs[a],
            &self.values[b],
            &self.derivs[b],
        )
    }
}

/// `[X, Y]_i = Σ_j (X_j ∂_j Y_i − Y_j ∂_j X_i)`.
pub fn bracket_components(x: &[f64], dx: &[Vec<f64>], y: &[f64], dy: &[Vec<f64>]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| (0..n).map(|j| x[j] * dy[i][j] - y[j] * dx[i][j]).sum())
        .collect()
}

/// Evaluates the invariant fields of `kind` at `g` from one jet evaluation
/// of the law over `(h, g)`.
pub fn field_frame(group: &LieGroup, kind: FieldKind, g: &[f64]) -> Result<FieldFrame> {
    let n = group.dim();
    if g.len() != n {
        return Err(Error::Argument(format!(
            "point has length {}, group dim {n}",
            g.len()
        )));
    }
    let h = Jet2::vars_at(&group.identity(), 0, 2 * n);
    let gj = Jet2::vars_at(g, n, 2 * n);
    let m = match kind {
        FieldKind::Right => group.compose(&h, &gj)?,
        FieldKind::Left => group.compose(&gj, &h)?,
    };
    let values = (0..n)
        .map(|b| (0..n).map(|i| m[i].grad(b)).collect())
        .collect();
    let derivs = (0..n)
        .map(|b| {
            (0..n)
                .map(|i| (0..n).map(|j| m[i].hess(b, n + j)).collect())
                .collect()
        })
        .collect();
    Ok(FieldFrame { values, derivs })
}

/// A vector field on the group: an invariant generator or the commutator
/// of two invariant generators.
#[derive(Debug, Clone)]
pub enum VectorField {
    Invariant {
        group: LieGroup,
        kind: FieldKind,
        index: usize,
    },
    Commutator(Box<VectorField>, Box<VectorField>),
}

impl VectorField {
    pub fn eval(&self, g: &[f64]) -> Result<Vec<f64>> {
        match self {
            VectorField::Invariant { .. } => Ok(self.eval_with_jacobian(g)?.0),
            VectorField::Commutator(x, y) => {
                let (xv, xd) = x.eval_with_jacobian(g)?;
                let (yv, yd) = y.eval_with_jacobian(g)?;
                Ok(bracket_components(&xv, &xd, &yv, &yd))
            }
        }
    }

    /// Components and their Jacobian `d[i][j] = ∂_j X_i`.
    pub fn eval_with_jacobian(&self, g: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        match self {
            VectorField::Invariant { group, kind, index } => {
                let f = field_frame(group, *kind, g)?;
                Ok((f.values[*index].clone(), f.derivs[*index].clone()))
            }
            VectorField::Commutator(..) => Err(Error::Structural(
                "derivatives of a commutator field need third-order jets".into(),
            )),
        }
    }
}

fn invariant(group: &LieGroup, kind: FieldKind, label: &str) -> Result<VectorField> {
    Ok(VectorField::Invariant {
        group: group.clone(),
        kind,
        index: group.label_index(label)?,
    })
}

pub fn left_field(group: &LieGroup, label: &str) -> Result<VectorField> {
    invariant(group, FieldKind::Left, label)
}

pub fn right_field(group: &LieGroup, label: &str) -> Result<VectorField> {
    invariant(group, FieldKind::Right, label)
}

pub fn commutator_field(x: &VectorField, y: &VectorField) -> VectorField {
    VectorField::Commutator(Box::new(x.clone()), Box::new(y.clone()))
}
