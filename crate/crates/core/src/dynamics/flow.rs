use crate::error::{Error, Result};
use crate::group_model::LieGroup;
use crate::jetcalc::linalg::DEFAULT_NULLSPACE_TOL;
use crate::jetcalc::{rk4_integrate, OdeTrajectory};
use crate::lie_engine::{characteristic_kernel, noether_invariants};

/// The characteristic direction at `g`, scaled so the evolution coordinate
/// advances at unit rate.
pub fn characteristic_direction(group: &LieGroup, g: &[f64]) -> Result<Vec<f64>> {
    let ev = group.evolution().ok_or_else(|| {
        Error::Structural(format!(
            "group {} declares no evolution coordinate",
            group.name()
        ))
    })?;
    let ns = characteristic_kernel(group, g, DEFAULT_NULLSPACE_TOL)?;
    if ns.dim() != 1 {
        return Err(Error::Structural(format!(
            "characteristic kernel has dimension {} at {g:?}; a flow needs exactly 1",
            ns.dim()
        )));
    }
    let k = &ns.basis[0];
    if k[ev].abs() < 1e-12 {
        return Err(Error::Structural(format!(
            "characteristic direction at {g:?} has no component along '{}'",
            group.labels()[ev]
        )));
    }
    let s = 1.0 / k[ev];
    Ok(k.iter().map(|x| x * s).collect())
}

/// Integrates the characteristic direction from `p0`, recomputing the kernel
/// at every stage.
pub fn flow_characteristic(
    group: &LieGroup,
    p0: &[f64],
    t_final: f64,
    step: f64,
) -> Result<OdeTrajectory> {
    if p0.len() != group.dim() {
        return Err(Error::Argument(format!(
            "initial point has length {}, group dim {}",
            p0.len(),
            group.dim()
        )));
    }
    characteristic_direction(group, p0)?;
    rk4_integrate(|_, y| characteristic_direction(group, y), p0, t_final, step)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport {
    pub labels: Vec<String>,
    /// `max_t |F_a(t) − F_a(0)|` per generator.
    pub drift: Vec<f64>,
    pub step: f64,
    pub t_final: f64,
}

impl ConservationReport {
    pub fn max_drift(&self) -> f64 {
        self.drift.iter().fold(0.0f64, |m, d| m.max(*d))
    }

    pub fn drift_of(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.drift[i])
    }
}

/// Noether invariants along every sample of `trajectory`, in generator order.
pub fn noether_series(group: &LieGroup, trajectory: &OdeTrajectory) -> Result<Vec<Vec<f64>>> {
    trajectory
        .states
        .iter()
        .map(|s| noether_invariants(group, s))
        .collect()
}

pub fn conservation_report(
    group: &LieGroup,
    trajectory: &OdeTrajectory,
) -> Result<ConservationReport> {
    let series = noether_series(group, trajectory)?;
    let n = group.dim();
    let mut drift = vec![0.0; n];
    if let Some(first) = series.first() {
        for f in &series {
            for a in 0..n {
                drift[a] = f64::max(drift[a], (f[a] - first[a]).abs());
            }
        }
    }
    Ok(ConservationReport {
        labels: group.labels().to_vec(),
        drift,
        step: trajectory.step,
        t_final: trajectory.times.last().copied().unwrap_or(0.0),
    })
}
