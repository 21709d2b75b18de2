use nalgebra::DMatrix;

use super::fields::{field_frame, FieldKind};
use super::theta::coframe;
use crate::error::{Error, Result};
use crate::group_model::LieGroup;
use crate::jetcalc::linalg;
use crate::sampling;

/// Worst residuals of the invariance identities over a seeded sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub samples: usize,
    pub seed: u64,
    /// `L_{X^R_a} Θ`, computed as `d(i_X Θ) + i_X dΘ`.
    pub lie_theta: f64,
    /// Divergence of right fields against `|det θ^L|`.
    pub divergence: f64,
    /// Components of `[X^L_a, X^R_b]`.
    pub left_right: f64,
    /// `L_{X^R_a} θ^k` for every left-invariant form.
    pub lie_coframe: f64,
    /// Points where the inverse or coframe could not be evaluated.
    pub skipped: Vec<Vec<f64>>,
}

impl InvarianceReport {
    pub fn max(&self) -> f64 {
        self.lie_theta
            .max(self.divergence)
            .max(self.left_right)
            .max(self.lie_coframe)
    }
}

/// Residuals of the three invariance identities at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResiduals {
    pub lie_theta: f64,
    pub divergence: f64,
    pub left_right: f64,
    pub lie_coframe: f64,
}

pub fn invariance_at(group: &LieGroup, g: &[f64]) -> Result<PointResiduals> {
    let n = group.dim();
    let cf = coframe(group, g)?;
    let right = field_frame(group, FieldKind::Right, g)?;
    let left = field_frame(group, FieldKind::Left, g)?;
    let c = group.central();
    let theta = &cf.forms[c];
    let dth = &cf.derivs[c];

    let cmat = DMatrix::from_fn(n, n, |k, j| cf.forms[k][j]);
    let cinv = linalg::invert(&cmat)?;
    // ∂_i ln|det C| = tr(C⁻¹ ∂_i C)
    let dlogdet: Vec<f64> = (0..n)
        .map(|i| {
            let mut tr = 0.0;
            for a in 0..n {
                for k in 0..n {
                    tr += cinv[(a, k)] * cf.derivs[k][i][a];
                }
            }
            tr
        })
        .collect();

    let mut r = PointResiduals {
        lie_theta: 0.0,
        divergence: 0.0,
        left_right: 0.0,
        lie_coframe: 0.0,
    };
    for b in 0..n {
        let x = &right.values[b];
        let dx = &right.derivs[b];
        for j in 0..n {
            // ∂_j(Θ·X) + Σ_i X_i (∂_iΘ_j − ∂_jΘ_i)
            let mut v = 0.0;
            for i in 0..n {
                v += dth[j][i] * x[i] + theta[i] * dx[i][j];
                v += x[i] * (dth[i][j] - dth[j][i]);
            }
            r.lie_theta = r.lie_theta.max(v.abs());
        }
        let div: f64 = (0..n).map(|i| dx[i][i] + x[i] * dlogdet[i]).sum();
        r.divergence = r.divergence.max(div.abs());
        for k in 0..n {
            for j in 0..n {
                let v: f64 = (0..n)
                    .map(|i| x[i] * cf.derivs[k][i][j] + cf.forms[k][i] * dx[i][j])
                    .sum();
                r.lie_coframe = r.lie_coframe.max(v.abs());
            }
        }
        for a in 0..n {
            let br = super::fields::bracket_components(
                &left.values[a],
                &left.derivs[a],
                &right.values[b],
                &right.derivs[b],
            );
            r.left_right = br.iter().fold(r.left_right, |m, v| m.max(v.abs()));
        }
    }
    Ok(r)
}

/// Checks that right fields preserve `Θ`, the left coframe and its volume,
/// and commute with left fields, at `samples` seeded points.
pub fn invariance_suite(group: &LieGroup, samples: usize, seed: u64) -> Result<InvarianceReport> {
    if samples == 0 {
        return Err(Error::Argument(
            "invariance_suite needs at least one sample".into(),
        ));
    }
    let mut rng = sampling::rng(seed);
    let mut rep = InvarianceReport {
        samples,
        seed,
        lie_theta: 0.0,
        divergence: 0.0,
        left_right: 0.0,
        lie_coframe: 0.0,
        skipped: Vec::new(),
    };
    for _ in 0..samples {
        let g = group.sample(&mut rng);
        match invariance_at(group, &g) {
            Ok(p) => {
                rep.lie_theta = rep.lie_theta.max(p.lie_theta);
                rep.divergence = rep.divergence.max(p.divergence);
                rep.left_right = rep.left_right.max(p.left_right);
                rep.lie_coframe = rep.lie_coframe.max(p.lie_coframe);
            }
            Err(Error::Numeric { .. }) | Err(Error::Domain { .. }) => rep.skipped.push(g),
            Err(e) => return Err(e),
        }
    }
    if rep.skipped.len() == samples {
        return Err(Error::Numeric {
            message: format!("no sample point of {} could be evaluated", group.name()),
            residual: f64::NAN,
        });
    }
    Ok(rep)
}
