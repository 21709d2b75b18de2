use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default relative tolerance for rank decisions.
pub const DEFAULT_NULLSPACE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct NullspaceResult {
    /// Orthonormal kernel vectors.
    pub basis: Vec<Vec<f64>>,
    pub rank: usize,
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
}

impl NullspaceResult {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Kernel of `matrix` from its SVD: every right-singular direction whose
/// singular value is below `tol` times the largest one.
pub fn nullspace(matrix: &DMatrix<f64>, tol: f64) -> Result<NullspaceResult> {
    if !(tol > 0.0) {
        return Err(Error::Argument(format!(
            "nullspace tolerance {tol} must be positive"
        )));
    }
    let (m, n) = matrix.shape();
    if n == 0 {
        return Ok(NullspaceResult {
            basis: Vec::new(),
            rank: 0,
            singular_values: Vec::new(),
        });
    }
    // Pad short matrices with zero rows so the SVD exposes all n right
    // singular vectors.
    let a = if m < n {
        let mut padded = DMatrix::zeros(n, n);
        padded.view_mut((0, 0), (m, n)).copy_from(matrix);
        padded
    } else {
        matrix.clone()
    };
    let svd = a.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Structural("SVD did not return right singular vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let cutoff = tol * smax;
    let mut basis = Vec::new();
    for &i in &order {
        let s = svd.singular_values[i];
        if smax == 0.0 || s < cutoff {
            basis.push(v_t.row(i).iter().copied().collect());
        }
    }
    let rank = n - basis.len();
    // Report only min(m, n) genuine singular values.
    let reported = singular_values.into_iter().take(m.min(n)).collect();
    Ok(NullspaceResult {
        basis,
        rank,
        singular_values: reported,
    })
}

/// Solves `a x = b` by LU with partial pivoting.
pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    a.clone().lu().solve(b).ok_or_else(|| Error::Numeric {
        message: "singular linear system".into(),
        residual: f64::INFINITY,
    })
}

pub fn invert(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    a.clone().try_inverse().ok_or_else(|| Error::Numeric {
        message: "singular matrix".into(),
        residual: f64::INFINITY,
    })
}

pub fn from_rows(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(m, n, |i, j| rows[i][j])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_identity() {
        let z = nullspace(&DMatrix::zeros(2, 2), 1e-8).unwrap();
        assert_eq!((z.rank, z.dim()), (0, 2));
        let i = nullspace(&DMatrix::identity(3, 3), 1e-8).unwrap();
        assert_eq!((i.rank, i.dim()), (3, 0));
    }

    #[test]
    fn coordinate_kernel_of_wide_matrix() {
        let a = from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        let k = nullspace(&a, 1e-8).unwrap();
        assert_eq!(k.dim(), 1);
        assert!((k.basis[0][2].abs() - 1.0).abs() < 1e-14);
        assert_eq!(k.singular_values.len(), 2);
    }

    #[test]
    fn rejects_nonpositive_tol() {
        assert!(nullspace(&DMatrix::zeros(1, 1), 0.0).is_err());
    }
}
