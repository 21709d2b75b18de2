use std::collections::BTreeSet;

use nalgebra::DMatrix;

use super::fields::{field_frame, FieldKind};
use super::structure::StructureTable;
use super::theta::{theta, theta_and_dtheta};
use crate::error::Result;
use crate::group_model::LieGroup;
use crate::jetcalc::linalg::{nullspace, NullspaceResult};

/// Kernel of `[dΘ; Θ]` at `g`: tangent vectors annihilating both `Θ` and
/// `dΘ`.
pub fn characteristic_kernel(group: &LieGroup, g: &[f64], tol: f64) -> Result<NullspaceResult> {
    characteristic_kernel_frozen(group, g, tol, &[])
}

/// As [`characteristic_kernel`], but on the submanifold where the listed
/// coordinates are held constant: `Θ` and `dΘ` are pulled back by dropping
/// the frozen rows and columns. Returned vectors are embedded back with
/// zeros in the frozen slots.
pub fn characteristic_kernel_frozen(
    group: &LieGroup,
    g: &[f64],
    tol: f64,
    frozen: &[usize],
) -> Result<NullspaceResult> {
    let n = group.dim();
    let (th, dth) = theta_and_dtheta(group, g)?;
    let free: Vec<usize> = (0..n).filter(|i| !frozen.contains(i)).collect();
    let k = free.len();
    let m = DMatrix::from_fn(k + 1, k, |r, c| {
        let j = free[c];
        if r < k {
            dth[free[r]][j]
        } else {
            th[j]
        }
    });
    let mut ns = nullspace(&m, tol)?;
    ns.basis = ns
        .basis
        .into_iter()
        .map(|v| {
            let mut full = vec![0.0; n];
            for (c, &j) in free.iter().enumerate() {
                full[j] = v[c];
            }
            full
        })
        .collect();
    Ok(ns)
}

/// `F_a(g) = Θ(g)·X^R_a(g)`.
pub fn noether_invariant(group: &LieGroup, label: &str, g: &[f64]) -> Result<f64> {
    let a = group.label_index(label)?;
    Ok(noether_invariants(group, g)?[a])
}

/// All Noether invariants at `g`, in generator order.
pub fn noether_invariants(group: &LieGroup, g: &[f64]) -> Result<Vec<f64>> {
    let th = theta(group, g)?;
    let frame = field_frame(group, FieldKind::Right, g)?;
    Ok(frame
        .values
        .iter()
        .map(|x| x.iter().zip(&th).map(|(a, b)| a * b).sum())
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub basic: BTreeSet<String>,
    pub non_basic: BTreeSet<String>,
    pub central: String,
    /// Pairs `(a, b)` with `C^central_{ab} ≠ 0`, listed in both orders.
    pub pairings: Vec<(String, String)>,
}

pub const PAIRING_TOL: f64 = 1e-12;

/// Basic generators are those whose commutator with some other generator
/// has a central component.
pub fn classify_parameters(table: &StructureTable, central: &str) -> Result<ClassificationReport> {
    let c = table.label_index(central)?;
    let n = table.dim();
    let mut pairings = Vec::new();
    let mut basic = BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            if a != c && b != c && table.get(a, b, c).abs() > PAIRING_TOL {
                pairings.push((table.labels[a].clone(), table.labels[b].clone()));
                basic.insert(table.labels[a].clone());
            }
        }
    }
    let non_basic = table
        .labels
        .iter()
        .enumerate()
        .filter(|(i, l)| *i != c && !basic.contains(*l))
        .map(|(_, l)| l.clone())
        .collect();
    Ok(ClassificationReport {
        basic,
        non_basic,
        central: central.to_string(),
        pairings,
    })
}
