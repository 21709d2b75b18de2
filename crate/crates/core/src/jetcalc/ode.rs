use crate::error::{Error, Result};

/// Samples of a fixed-step integration. `error` is set when the field
/// failed part-way; the samples up to that point are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub step: f64,
    pub error: Option<Error>,
}

impl OdeTrajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_complete(&self) -> bool {
        self.error.is_none()
    }
}

fn axpy(y: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

/// Classic fourth-order Runge–Kutta from `t = 0` to `t_final`. The final
/// step is shortened to land exactly on `t_final`.
pub fn rk4_integrate<F>(mut field: F, y0: &[f64], t_final: f64, step: f64) -> Result<OdeTrajectory>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
{
    if !(step > 0.0) || !(t_final > 0.0) {
        return Err(Error::Argument(format!(
            "integration needs step > 0 and t_final > 0 (got step {step}, t_final {t_final})"
        )));
    }
    let steps = (t_final / step - 1e-9).ceil().max(1.0) as usize;
    let mut traj = OdeTrajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        step,
        error: None,
    };
    traj.times.push(0.0);
    traj.states.push(y0.to_vec());
    let mut y = y0.to_vec();
    for k in 0..steps {
        let t = k as f64 * step;
        let h = if k + 1 == steps { t_final - t } else { step };
        let stage = |field: &mut F| -> Result<Vec<f64>> {
            let k1 = field(t, &y)?;
            let k2 = field(t + 0.5 * h, &axpy(&y, 0.5 * h, &k1))?;
            let k3 = field(t + 0.5 * h, &axpy(&y, 0.5 * h, &k2))?;
            let k4 = field(t + h, &axpy(&y, h, &k3))?;
            Ok((0..y.len())
                .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect())
        };
        match stage(&mut field) {
            Ok(next) => {
                y = next;
                traj.times
                    .push(if k + 1 == steps { t_final } else { t + h });
                traj.states.push(y.clone());
            }
            Err(e) => {
                traj.error = Some(e);
                break;
            }
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_is_constant() {
        let tr = rk4_integrate(|_, y| Ok(vec![0.0; y.len()]), &[5.0], 1.0, 0.1).unwrap();
        assert!(tr.states.iter().all(|s| s[0] == 5.0));
        assert_eq!(*tr.times.last().unwrap(), 1.0);
    }

    #[test]
    fn exponential_growth() {
        let tr = rk4_integrate(|_, y| Ok(vec![y[0]]), &[1.0], 1.0, 1e-3).unwrap();
        assert!((tr.last()[0] - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn shortened_last_step() {
        let tr = rk4_integrate(|_, _| Ok(vec![1.0]), &[0.0], 1.05, 0.1).unwrap();
        assert_eq!(tr.times.len(), 12);
        assert!((tr.last()[0] - 1.05).abs() < 1e-12);
    }

    #[test]
    fn domain_error_keeps_partial_trajectory() {
        let tr = rk4_integrate(
            |t, _| {
                if t > 0.5 {
                    Err(Error::domain("sqrt", "test"))
                } else {
                    Ok(vec![1.0])
                }
            },
            &[0.0],
            1.0,
            0.1,
        )
        .unwrap();
        assert!(!tr.is_complete());
        assert!(tr.times.len() > 1 && tr.times.len() < 11);
    }
}
