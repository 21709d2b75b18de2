use crate::error::{Error, Result};
use crate::group_model::LieGroup;
use crate::jetcalc::Jet2;

/// Left-invariant coframe at a point together with its first derivatives.
#[derive(Debug, Clone)]
pub struct CoframeJet {
    /// `forms[k][j]`: component `dg_j` of the `k`-th left-invariant form.
    pub forms: Vec<Vec<f64>>,
    /// `derivs[k][i][j] = ∂_i forms[k][j]`.
    pub derivs: Vec<Vec<Vec<f64>>>,
}

impl CoframeJet {
    /// Exterior derivative of form `k`: `d[i][j] = ∂_i θ_j − ∂_j θ_i`.
    pub fn exterior(&self, k: usize) -> Vec<Vec<f64>> {
        let d = &self.derivs[k];
        let n = d.len();
        (0..n)
            .map(|i| (0..n).map(|j| d[i][j] - d[j][i]).collect())
            .collect()
    }
}

/// The left-invariant coframe `θ^k_j(g) = ∂(g⁻¹ w)_k / ∂w_j` at `w = g`,
/// differentiated once more along `g` by carrying the inverse as a jet.
pub fn coframe(group: &LieGroup, g: &[f64]) -> Result<CoframeJet> {
    let n = group.dim();
    check_len(group, g)?;
    let z = Jet2::vars_at(g, 0, 2 * n);
    let w = Jet2::vars_at(g, n, 2 * n);
    let h = group.inverse(&z)?;
    let m = group.compose(&h, &w)?;
    let forms = m
        .iter()
        .map(|mk| (0..n).map(|j| mk.grad(n + j)).collect())
        .collect();
    let derivs = m
        .iter()
        .map(|mk| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| mk.hess(i, n + j) + mk.hess(n + i, n + j))
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(CoframeJet { forms, derivs })
}

fn check_len(group: &LieGroup, g: &[f64]) -> Result<()> {
    if g.len() != group.dim() {
        return Err(Error::Argument(format!(
            "point has length {}, group {} has dim {}",
            g.len(),
            group.name(),
            group.dim()
        )));
    }
    Ok(())
}

/// The quantization form: the central component of the left coframe.
pub fn theta(group: &LieGroup, g: &[f64]) -> Result<Vec<f64>> {
    check_len(group, g)?;
    let n = group.dim();
    let h = group.inverse(g)?;
    let hc: Vec<Jet2> = h.iter().map(|&v| Jet2::constant(v)).collect();
    let w = Jet2::vars(g);
    let m = group.compose(&hc, &w)?;
    Ok(m[group.central()].gradient(n))
}

/// `Θ` and `dΘ` at `g`.
pub fn theta_and_dtheta(group: &LieGroup, g: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let cf = coframe(group, g)?;
    let c = group.central();
    Ok((cf.forms[c].clone(), cf.exterior(c)))
}

/// `(dΘ)_{ij} = ∂_iΘ_j − ∂_jΘ_i` at `g`.
pub fn dtheta(group: &LieGroup, g: &[f64]) -> Result<Vec<Vec<f64>>> {
    Ok(theta_and_dtheta(group, g)?.1)
}
