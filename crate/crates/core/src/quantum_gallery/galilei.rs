use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::group_model::LieGroup;
use crate::lie_engine::{field_frame, FieldKind};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Samples of `Φ(t, v)` for a wavefunction `Ψ = ζ·Φ` on a rectangular
/// grid; `Φ` carries no `x` dependence.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSection {
    pub t0: f64,
    pub dt: f64,
    pub nt: usize,
    pub v0: f64,
    pub dv: f64,
    pub nv: usize,
    /// Row-major in `t`: `values[it * nv + iv]`.
    pub values: Vec<Complex64>,
}

impl GridSection {
    pub fn from_fn(
        (t0, dt, nt): (f64, f64, usize),
        (v0, dv, nv): (f64, f64, usize),
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        if !(dt > 0.0 && dv > 0.0) || nt < 5 || nv < 5 {
            return Err(Error::Argument(
                "grid needs positive spacings and at least 5 points per axis".into(),
            ));
        }
        let mut values = Vec::with_capacity(nt * nv);
        for it in 0..nt {
            for iv in 0..nv {
                values.push(f(t0 + it as f64 * dt, v0 + iv as f64 * dv));
            }
        }
        Ok(GridSection {
            t0,
            dt,
            nt,
            v0,
            dv,
            nv,
            values,
        })
    }

    pub fn t(&self, it: usize) -> f64 {
        self.t0 + it as f64 * self.dt
    }

    pub fn v(&self, iv: usize) -> f64 {
        self.v0 + iv as f64 * self.dv
    }

    pub fn at(&self, it: usize, iv: usize) -> Complex64 {
        self.values[it * self.nv + iv]
    }

    fn with_values(&self, values: Vec<Complex64>) -> GridSection {
        GridSection {
            values,
            ..self.clone()
        }
    }

    /// Fourth-order central difference along `t`; interior points only.
    pub fn d_dt(&self, it: usize, iv: usize) -> Complex64 {
        let f = |k: usize| self.at(k, iv);
        (f(it - 2) - f(it - 1) * 8.0 + f(it + 1) * 8.0 - f(it + 2)) / (12.0 * self.dt)
    }

    /// Fourth-order central difference along `v`; interior points only.
    pub fn d_dv(&self, it: usize, iv: usize) -> Complex64 {
        let f = |k: usize| self.at(it, k);
        (f(iv - 2) - f(iv - 1) * 8.0 + f(iv + 1) * 8.0 - f(iv + 2)) / (12.0 * self.dv)
    }

    fn interior(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (2..self.nt - 2).flat_map(move |it| (2..self.nv - 2).map(move |iv| (it, iv)))
    }

    fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }
}

fn check_group(group: &LieGroup) -> Result<[usize; 4]> {
    let idx = [
        group.label_index("t")?,
        group.label_index("x")?,
        group.label_index("v")?,
        group.central(),
    ];
    if group.dim() != 4 {
        return Err(Error::Argument("expected the 1+1 Galilei group".into()));
    }
    Ok(idx)
}

/// Applies an invariant field to `ζΦ` at a grid point, dividing out `ζ`:
/// `X^t ∂_tΦ + X^v ∂_vΦ + i X^φ Φ` (`Φ` has no `x` dependence).
fn apply_field(
    sec: &GridSection,
    field: &[f64],
    idx: &[usize; 4],
    it: usize,
    iv: usize,
) -> Complex64 {
    let [ti, _, vi, ci] = *idx;
    let mut out = I * field[ci] * sec.at(it, iv);
    if field[ti] != 0.0 {
        out += sec.d_dt(it, iv) * field[ti];
    }
    if field[vi] != 0.0 {
        out += sec.d_dv(it, iv) * field[vi];
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationResidual {
    /// `X^L_x Ψ`, identically zero for an `x`-independent section.
    pub x_residual: f64,
    /// Max over interior points of `|i X^L_t Ψ / ζ|`, i.e. of
    /// `i∂_tΦ − (m v²/2)Φ`.
    pub schrodinger: f64,
    /// Max `|Φ|` on the grid, for scale.
    pub scale: f64,
    pub interior_points: usize,
}

/// Residuals of the polarization conditions `X^L_x Ψ = 0` and `X^L_t Ψ = 0`
/// using the engine's left fields of `group` at `(t, 0, v, 0)`.
pub fn galilei_polarization_residual(
    group: &LieGroup,
    sec: &GridSection,
) -> Result<PolarizationResidual> {
    let idx = check_group(group)?;
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut x_res = 0.0f64;
    for (it, iv) in sec.interior() {
        let mut p = vec![0.0; 4];
        p[idx[0]] = sec.t(it);
        p[idx[2]] = sec.v(iv);
        let frame = field_frame(group, FieldKind::Left, &p)?;
        let r = I * apply_field(sec, &frame.values[idx[0]], &idx, it, iv);
        worst = worst.max(r.norm());
        let xr = apply_field(sec, &frame.values[idx[1]], &idx, it, iv);
        // X^L_x has only an x component on this slice.
        x_res = x_res.max(xr.norm());
        count += 1;
    }
    Ok(PolarizationResidual {
        x_residual: x_res,
        schrodinger: worst,
        scale: sec.max_abs(),
        interior_points: count,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorResidual {
    /// `max |[X̂_x, X̂_v]Φ − (−m)(iΦ)|` over points two cells inside the
    /// interior (the commutator nests two stencils).
    pub commutator: f64,
    /// `max |ÊΦ − p̂²/(2m) Φ|` with `Ê = i∂_t`, `p̂ = −iX̂_x`.
    pub energy: f64,
    pub mass: f64,
}

/// Realizes the right fields as operators on the grid and checks the
/// canonical commutator and the energy–momentum relation.
pub fn galilei_operator_suite(
    group: &LieGroup,
    sec: &GridSection,
    m: f64,
) -> Result<OperatorResidual> {
    let idx = check_group(group)?;
    let frame_at = |it: usize, iv: usize| {
        let mut p = vec![0.0; 4];
        p[idx[0]] = sec.t(it);
        p[idx[2]] = sec.v(iv);
        field_frame(group, FieldKind::Right, &p)
    };
    // X̂_x Φ and X̂_v Φ on the interior; zero on the border where the stencil
    // does not fit.
    let mut xphi = vec![Complex64::new(0.0, 0.0); sec.values.len()];
    let mut vphi = xphi.clone();
    let mut energy = 0.0f64;
    for (it, iv) in sec.interior() {
        let f = frame_at(it, iv)?;
        let k = it * sec.nv + iv;
        xphi[k] = apply_field(sec, &f.values[idx[1]], &idx, it, iv);
        vphi[k] = apply_field(sec, &f.values[idx[2]], &idx, it, iv);
        // X̂_x has no derivative part, so p̂ = −iX̂_x is multiplication by
        // the phase component of X^R_x.
        let p = f.values[idx[1]][idx[3]];
        let e = I * sec.d_dt(it, iv);
        energy = energy.max((e - sec.at(it, iv) * (p * p / (2.0 * m))).norm());
    }
    let xs = sec.with_values(xphi);
    let vs = sec.with_values(vphi);
    let mut comm = 0.0f64;
    for it in 4..sec.nt - 4 {
        for iv in 4..sec.nv - 4 {
            let f = frame_at(it, iv)?;
            let xv = apply_field(&vs, &f.values[idx[1]], &idx, it, iv);
            let vx = apply_field(&xs, &f.values[idx[2]], &idx, it, iv);
            let expect = -m * I * sec.at(it, iv);
            comm = comm.max((xv - vx - expect).norm());
        }
    }
    Ok(OperatorResidual {
        commutator: comm,
        energy,
        mass: m,
    })
}

/// The standard test grid: `t ∈ [0, 1]` step 0.01, `v ∈ [−3, 3]` step 0.01.
pub fn standard_grid(f: impl Fn(f64, f64) -> Complex64) -> Result<GridSection> {
    GridSection::from_fn((0.0, 0.01, 101), (-3.0, 0.01, 601), f)
}

/// `e^{−v²/2} e^{−i m v² t/2}`, an exact momentum-space solution.
pub fn gaussian_solution(m: f64) -> impl Fn(f64, f64) -> Complex64 {
    move |t, v| Complex64::from_polar((-0.5 * v * v).exp(), -0.5 * m * v * v * t)
}
