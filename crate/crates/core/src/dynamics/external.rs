use crate::error::{Error, Result};
use crate::grouplang::{parse_expression_at, Expr, NameContext};
use crate::jetcalc::Jet2;
use crate::sampling;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// Electromagnetic potential `A0, A1, A2, A3`.
    Electromagnetic,
    /// Weak-field metric perturbation `h00, h1, h2, h3` with `h_i = h^{0i}`.
    Gravity,
}

impl FieldKind {
    pub fn names(self) -> [&'static str; 4] {
        match self {
            FieldKind::Electromagnetic => ["A0", "A1", "A2", "A3"],
            FieldKind::Gravity => ["h00", "h1", "h2", "h3"],
        }
    }
}

pub const SPACETIME: [&str; 4] = ["t", "x", "y", "z"];

/// Four scalar expressions over `(t, x, y, z)`: a potential and a 3-vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfig {
    pub kind: FieldKind,
    /// Scalar part then the three vector components; `None` means zero.
    pub exprs: [Option<Expr>; 4],
}

impl FieldConfig {
    /// Parses `NAME = EXPR` lines. All names must belong to one family;
    /// unlisted components are zero.
    pub fn parse(text: &str) -> Result<FieldConfig> {
        let ctx = NameContext::new(&SPACETIME, &[], false);
        let mut kind: Option<FieldKind> = None;
        let mut exprs: [Option<Expr>; 4] = Default::default();
        for (k, raw) in text.lines().enumerate() {
            let lineno = k + 1;
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let (name, rhs) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(lineno, 1, "expected NAME = EXPR"))?;
            let name = name.trim();
            let (this, slot) = [FieldKind::Electromagnetic, FieldKind::Gravity]
                .into_iter()
                .find_map(|fk| fk.names().iter().position(|n| *n == name).map(|i| (fk, i)))
                .ok_or_else(|| {
                    Error::parse(lineno, 1, format!("unknown field component '{name}'"))
                })?;
            if kind.is_some_and(|k| k != this) {
                return Err(Error::parse(
                    lineno,
                    1,
                    "electromagnetic and gravity components cannot be mixed",
                ));
            }
            kind = Some(this);
            if exprs[slot].is_some() {
                return Err(Error::parse(
                    lineno,
                    1,
                    format!("duplicate component '{name}'"),
                ));
            }
            let col = raw.find('=').map(|i| i + 2).unwrap_or(1);
            exprs[slot] = Some(parse_expression_at(rhs.trim(), &ctx, lineno, col)?);
        }
        let kind = kind.ok_or_else(|| Error::parse(1, 1, "field config defines no component"))?;
        Ok(FieldConfig { kind, exprs })
    }

    /// Components as jets over `(t, x, y, z)`.
    pub fn eval_jets(&self, t: f64, x: &[f64]) -> Result<[Jet2; 4]> {
        let p = [t, x[0], x[1], x[2]];
        let vars = Jet2::vars(&p);
        let mut out: [Jet2; 4] = Default::default();
        for (slot, e) in self.exprs.iter().enumerate() {
            out[slot] = match e {
                Some(e) => e.eval(&[], &vars, &[])?,
                None => Jet2::constant(0.0),
            };
        }
        Ok(out)
    }

    /// Scalar potential value at `(t, x)`.
    pub fn scalar(&self, t: f64, x: &[f64]) -> Result<f64> {
        Ok(self.eval_jets(t, x)?[0].value())
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `v ∧ (∇ ∧ A) − ∇A0 − ∂A/∂t` from jets of `(A0, A)` over `(t, x, y, z)`.
fn lorentz_bracket(pot: &[Jet2; 4], v: &[f64]) -> [f64; 3] {
    let d = |c: usize, k: usize| pot[c].grad(k);
    // Spatial derivative index: x → 1, y → 2, z → 3.
    let curl = [d(3, 2) - d(2, 3), d(1, 3) - d(3, 1), d(2, 1) - d(1, 2)];
    let vxb = cross([v[0], v[1], v[2]], curl);
    [
        vxb[0] - d(0, 1) - d(1, 0),
        vxb[1] - d(0, 2) - d(2, 0),
        vxb[2] - d(0, 3) - d(3, 0),
    ]
}

fn require_kind(cfg: &FieldConfig, kind: FieldKind) -> Result<()> {
    if cfg.kind != kind {
        return Err(Error::Argument(format!(
            "expected {:?} field config, got {:?}",
            kind, cfg.kind
        )));
    }
    Ok(())
}

/// `dv/dt = (q/m)[v ∧ (∇ ∧ A) − ∇A0 − ∂A/∂t]`.
pub fn em_acceleration(
    cfg: &FieldConfig,
    q_over_m: f64,
    t: f64,
    x: &[f64],
    v: &[f64],
) -> Result<[f64; 3]> {
    let b = lorentz_bracket(&cfg.eval_jets(t, x)?, v);
    Ok(b.map(|c| q_over_m * c))
}

/// `dv/dt = −[v ∧ (∇ ∧ h) − ∇h00 − ∂h/∂t] + ¼∇(h·h)`; the mass has already
/// cancelled.
pub fn gravity_acceleration(cfg: &FieldConfig, t: f64, x: &[f64], v: &[f64]) -> Result<[f64; 3]> {
    let pot = cfg.eval_jets(t, x)?;
    let b = lorentz_bracket(&pot, v);
    let hh = &(&pot[1] * &pot[1]) + &(&(&pot[2] * &pot[2]) + &(&pot[3] * &pot[3]));
    Ok([
        -b[0] + 0.25 * hh.grad(1),
        -b[1] + 0.25 * hh.grad(2),
        -b[2] + 0.25 * hh.grad(3),
    ])
}

fn check_state(y: &[f64]) -> Result<()> {
    if y.len() != 6 {
        return Err(Error::Argument(format!(
            "state must be (x, v) of length 6, got {}",
            y.len()
        )));
    }
    Ok(())
}

/// State derivative on `(x, v)` for a charge in the field `cfg`.
pub fn em_equations_of_motion(
    cfg: &FieldConfig,
    q: f64,
    m: f64,
) -> Result<impl Fn(f64, &[f64]) -> Result<Vec<f64>> + '_> {
    require_kind(cfg, FieldKind::Electromagnetic)?;
    if !(m > 0.0) {
        return Err(Error::Argument(format!("mass must be positive, got {m}")));
    }
    let qm = q / m;
    Ok(move |t: f64, y: &[f64]| {
        check_state(y)?;
        let a = em_acceleration(cfg, qm, t, &y[0..3], &y[3..6])?;
        Ok(vec![y[3], y[4], y[5], a[0], a[1], a[2]])
    })
}

/// State derivative on `(x, v)` for the weak-field geodesic force. `m` is
/// validated but does not enter: it cancels before integration.
pub fn gravity_equations_of_motion(
    cfg: &FieldConfig,
    m: f64,
) -> Result<impl Fn(f64, &[f64]) -> Result<Vec<f64>> + '_> {
    require_kind(cfg, FieldKind::Gravity)?;
    if !(m > 0.0) {
        return Err(Error::Argument(format!("mass must be positive, got {m}")));
    }
    Ok(move |t: f64, y: &[f64]| {
        check_state(y)?;
        let a = gravity_acceleration(cfg, t, &y[0..3], &y[3..6])?;
        Ok(vec![y[3], y[4], y[5], a[0], a[1], a[2]])
    })
}

/// One way of reading gravity as electromagnetism: `q = q_sign·m` and
/// `𝒜 = (h00 + a0_sign·¼ h·h, h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GemConvention {
    pub q_sign: i8,
    pub a0_sign: i8,
}

impl GemConvention {
    pub const ALL: [GemConvention; 4] = [
        GemConvention {
            q_sign: 1,
            a0_sign: 1,
        },
        GemConvention {
            q_sign: 1,
            a0_sign: -1,
        },
        GemConvention {
            q_sign: -1,
            a0_sign: 1,
        },
        GemConvention {
            q_sign: -1,
            a0_sign: -1,
        },
    ];

    /// The reading printed alongside the geodesic force.
    pub const PRINTED: GemConvention = GemConvention {
        q_sign: -1,
        a0_sign: -1,
    };

    pub fn describe(&self) -> String {
        format!(
            "q = {}m, A0 = h00 {} h.h/4",
            if self.q_sign > 0 { "+" } else { "-" },
            if self.a0_sign > 0 { "+" } else { "-" }
        )
    }

    /// Lorentz acceleration of the mapped potential.
    fn acceleration(&self, cfg: &FieldConfig, t: f64, x: &[f64], v: &[f64]) -> Result<[f64; 3]> {
        let mut pot = cfg.eval_jets(t, x)?;
        let hh = &(&pot[1] * &pot[1]) + &(&(&pot[2] * &pot[2]) + &(&pot[3] * &pot[3]));
        pot[0] = pot[0].axpy(1.0, &hh, 0.25 * f64::from(self.a0_sign));
        let b = lorentz_bracket(&pot, v);
        Ok(b.map(|c| f64::from(self.q_sign) * c))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GemReport {
    pub samples: usize,
    pub seed: u64,
    /// Sup-norm acceleration mismatch for every convention.
    pub residuals: Vec<(GemConvention, f64)>,
    /// The convention with the smallest mismatch.
    pub best: GemConvention,
    /// Number of conventions under the tolerance.
    pub passing: usize,
    pub tol: f64,
}

impl GemReport {
    pub fn unique(&self) -> bool {
        self.passing == 1
    }

    pub fn residual_of(&self, c: GemConvention) -> f64 {
        self.residuals
            .iter()
            .find(|(k, _)| *k == c)
            .map(|(_, r)| *r)
            .unwrap_or(f64::NAN)
    }
}

pub const GEM_TOL: f64 = 1e-9;

/// Compares the geodesic acceleration with the Lorentz acceleration of each
/// candidate potential over seeded `(t, x, v)` in `[−1, 1]`.
pub fn gem_equivalence_check(cfg: &FieldConfig, samples: usize, seed: u64) -> Result<GemReport> {
    require_kind(cfg, FieldKind::Gravity)?;
    if samples == 0 {
        return Err(Error::Argument(
            "gem_equivalence_check needs at least one sample".into(),
        ));
    }
    let mut rng = sampling::rng(seed);
    let points: Vec<[f64; 7]> = (0..samples)
        .map(|_| std::array::from_fn(|_| sampling::uniform(&mut rng, -1.0, 1.0)))
        .collect();
    let mut residuals = Vec::new();
    for conv in GemConvention::ALL {
        let mut worst = 0.0f64;
        for p in &points {
            let (t, x, v) = (p[0], &p[1..4], &p[4..7]);
            let g = gravity_acceleration(cfg, t, x, v)?;
            let e = conv.acceleration(cfg, t, x, v)?;
            for i in 0..3 {
                worst = worst.max((g[i] - e[i]).abs());
            }
        }
        residuals.push((conv, worst));
    }
    let best = residuals
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(c, _)| *c)
        .expect("four conventions");
    let passing = residuals.iter().filter(|(_, r)| *r < GEM_TOL).count();
    Ok(GemReport {
        samples,
        seed,
        residuals,
        best,
        passing,
        tol: GEM_TOL,
    })
}

/// Time for the in-plane velocity `(v_x, v_y)` of an `(x, v)` trajectory to
/// turn through one full revolution, from the unwrapped angle with linear
/// interpolation between samples.
pub fn gyration_period(traj: &crate::jetcalc::OdeTrajectory) -> Option<f64> {
    let angle = |s: &[f64]| s[4].atan2(s[3]);
    let first = traj.states.first()?;
    let mut prev = angle(first);
    let mut total = 0.0f64;
    for k in 1..traj.states.len() {
        let a = angle(&traj.states[k]);
        let mut d = a - prev;
        if d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        } else if d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        let next = total + d;
        if next.abs() >= 2.0 * std::f64::consts::PI {
            let frac = (2.0 * std::f64::consts::PI - total.abs()) / d.abs();
            let (t0, t1) = (traj.times[k - 1], traj.times[k]);
            return Some(t0 + frac * (t1 - t0));
        }
        total = next;
        prev = a;
    }
    None
}
