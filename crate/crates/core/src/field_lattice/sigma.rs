use num::BigRational;

use crate::error::{Error, Result};
use crate::group_model::{GroupLaw, LieGroup};
use crate::jetcalc::{rk4_integrate, Jet2, OdeTrajectory, Scalar};
use crate::lie_engine::{
    field_frame, noether_invariants, structure_constants, theta, FieldKind, Poly, StructureTable,
};
use crate::sampling::{self, SampleRng};

pub type Vec3 = [f64; 3];

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm_sq(a: &Vec3) -> f64 {
    a.iter().map(|x| x * x).sum()
}

/// Levi-Civita symbol on `0..3`.
pub fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Periodic 1-D lattice for the partial-trace SU(2) sigma model.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaLattice {
    pub sites: usize,
    pub spacing: f64,
    pub lambda: Vec3,
}

impl SigmaLattice {
    pub fn new(sites: usize, spacing: f64, lambda: Vec3) -> Result<Self> {
        if sites == 0 {
            return Err(Error::Validation("at least one site is required".into()));
        }
        if !(spacing > 0.0) {
            return Err(Error::Validation("spacing must be positive".into()));
        }
        if norm_sq(&lambda) == 0.0 {
            return Err(Error::Validation("λ must be nonzero".into()));
        }
        Ok(SigmaLattice {
            sites,
            spacing,
            lambda,
        })
    }

    pub fn dim(&self) -> usize {
        6 * self.sites
    }
}

/// Noether fields per site. Phase-space coordinates are laid out as
/// `[𝕊_0, …, 𝕊_{N−1}, 𝕃_0, …, 𝕃_{N−1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaState {
    pub s: Vec<Vec3>,
    pub l: Vec<Vec3>,
    /// `‖𝕊_i − λ‖²` at construction.
    pub casimirs: Vec<f64>,
}

impl SigmaState {
    pub fn new(lat: &SigmaLattice, s: Vec<Vec3>, l: Vec<Vec3>) -> Result<Self> {
        if s.len() != lat.sites || l.len() != lat.sites {
            return Err(Error::Argument(format!(
                "state must have {} sites",
                lat.sites
            )));
        }
        if s.iter().chain(&l).flatten().any(|x| !x.is_finite()) {
            return Err(Error::Validation("state entries must be finite".into()));
        }
        let casimirs = s.iter().map(|si| norm_sq(&sub(si, &lat.lambda))).collect();
        Ok(SigmaState { s, l, casimirs })
    }

    pub fn from_coords(lat: &SigmaLattice, z: &[f64]) -> Result<Self> {
        let n = lat.sites;
        if z.len() != 6 * n {
            return Err(Error::Argument(format!("expected {} coordinates", 6 * n)));
        }
        let v = |k: usize| [z[3 * k], z[3 * k + 1], z[3 * k + 2]];
        SigmaState::new(lat, (0..n).map(v).collect(), (n..2 * n).map(v).collect())
    }

    pub fn coords(&self) -> Vec<f64> {
        self.s.iter().chain(&self.l).flatten().copied().collect()
    }

    /// A seeded state with `𝕊_i ∈ [−1, 1]³` and `𝕃_i ∈ [−a, a]³`.
    pub fn random(lat: &SigmaLattice, seed: u64, l_amplitude: f64) -> Result<Self> {
        let mut rng = sampling::rng(seed);
        let mut v =
            |a: f64| -> Vec3 { std::array::from_fn(|_| sampling::uniform(&mut rng, -a, a)) };
        let s = (0..lat.sites).map(|_| v(1.0)).collect();
        let l = (0..lat.sites).map(|_| v(l_amplitude)).collect();
        SigmaState::new(lat, s, l)
    }

    pub fn total_l(&self, lat: &SigmaLattice) -> Vec3 {
        let mut t = [0.0; 3];
        for li in &self.l {
            for a in 0..3 {
                t[a] += lat.spacing * li[a];
            }
        }
        t
    }
}

/// The Poisson tensor at `z`: `{𝕃_a, 𝕃_b} = −η_abc 𝕃_c δ/Δ`,
/// `{𝕃_a, 𝕊_b} = −η_abc (𝕊_c − λ_c) δ/Δ`, `{𝕊, 𝕊} = 0`.
pub fn poisson_tensor(lat: &SigmaLattice, z: &[f64]) -> Vec<Vec<f64>> {
    let n = lat.sites;
    let dim = 6 * n;
    let mut p = vec![vec![0.0; dim]; dim];
    let inv = 1.0 / lat.spacing;
    for i in 0..n {
        let (si, li) = (3 * i, 3 * (n + i));
        for a in 0..3 {
            for b in 0..3 {
                let mut ll = 0.0;
                let mut ls = 0.0;
                for c in 0..3 {
                    let e = levi_civita(a, b, c);
                    ll -= e * z[li + c];
                    ls -= e * (z[si + c] - lat.lambda[c]);
                }
                p[li + a][li + b] = ll * inv;
                p[li + a][si + b] = ls * inv;
                p[si + b][li + a] = -ls * inv;
            }
        }
    }
    p
}

/// A functional of the `6N` phase-space coordinates, evaluated on jets.
pub type Functional<'a> = &'a dyn Fn(&[Jet2]) -> Result<Jet2>;

pub fn sigma_bracket(
    f: Functional,
    g: Functional,
    state: &SigmaState,
    lat: &SigmaLattice,
) -> Result<f64> {
    let z = state.coords();
    let v = Jet2::vars(&z);
    let (fj, gj) = (f(&v)?, g(&v)?);
    let p = poisson_tensor(lat, &z);
    let mut acc = 0.0;
    for (u, row) in p.iter().enumerate() {
        let fu = fj.grad(u);
        if fu == 0.0 {
            continue;
        }
        for (w, puw) in row.iter().enumerate() {
            acc += fu * puw * gj.grad(w);
        }
    }
    Ok(acc)
}

/// Max Jacobi residual `P_ut ∂_t P_vw + cyclic` over all coordinate
/// triples. The tensor is affine in `z`, so a unit difference is exact.
pub fn sigma_jacobi_residual(lat: &SigmaLattice, state: &SigmaState) -> f64 {
    let z = state.coords();
    let dim = z.len();
    let p = poisson_tensor(lat, &z);
    let base = poisson_tensor(lat, &vec![0.0; dim]);
    let dp: Vec<Vec<Vec<f64>>> = (0..dim)
        .map(|t| {
            let mut e = vec![0.0; dim];
            e[t] = 1.0;
            let pt = poisson_tensor(lat, &e);
            pt.iter()
                .zip(&base)
                .map(|(r, b)| r.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect()
        })
        .collect();
    let mut worst = 0.0f64;
    for u in 0..dim {
        for v in 0..dim {
            for w in 0..dim {
                let mut j = 0.0;
                for t in 0..dim {
                    j += p[u][t] * dp[t][v][w] + p[v][t] * dp[t][w][u] + p[w][t] * dp[t][u][v];
                }
                worst = worst.max(j.abs());
            }
        }
    }
    worst
}

fn hamiltonian_generic<S: Scalar>(lat: &SigmaLattice, z: &[S]) -> S {
    let n = lat.sites;
    let h = lat.spacing;
    let mut acc = S::constant(0.0);
    for i in 0..n {
        let j = (i + 1) % n;
        for a in 0..3 {
            let l = z[3 * (n + i) + a].clone();
            let d = (z[3 * j + a].clone() - z[3 * i + a].clone()) * (1.0 / h);
            acc = acc + l.clone() * l + d.clone() * d;
        }
    }
    acc * (0.5 * h)
}

/// `ℍ = ½Δ Σ_i [‖𝕃_i‖² + ‖(𝕊_{i+1} − 𝕊_i)/Δ‖²]`, periodic.
pub fn sigma_hamiltonian(state: &SigmaState, lat: &SigmaLattice) -> f64 {
    hamiltonian_generic(lat, &state.coords())
}

/// Hand-derived equations of motion `ż = {z, ℍ}`:
/// `𝕊̇_i = (𝕊_i − λ) × 𝕃_i`, `𝕃̇_i = lap_i × (𝕊_i − λ)`.
pub fn sigma_rhs(lat: &SigmaLattice, z: &[f64]) -> Vec<f64> {
    let n = lat.sites;
    let h2 = lat.spacing * lat.spacing;
    let v = |k: usize| -> Vec3 { [z[3 * k], z[3 * k + 1], z[3 * k + 2]] };
    let mut out = vec![0.0; 6 * n];
    for i in 0..n {
        let shifted = sub(&v(i), &lat.lambda);
        let (prev, next) = (v((i + n - 1) % n), v((i + 1) % n));
        let lap: Vec3 = std::array::from_fn(|a| (next[a] - 2.0 * z[3 * i + a] + prev[a]) / h2);
        let ds = cross(&shifted, &v(n + i));
        let dl = cross(&lap, &shifted);
        out[3 * i..3 * i + 3].copy_from_slice(&ds);
        out[3 * (n + i)..3 * (n + i) + 3].copy_from_slice(&dl);
    }
    out
}

/// Max deviation of [`sigma_rhs`] from the bracket with the jet Hamiltonian.
pub fn sigma_rhs_crosscheck(lat: &SigmaLattice, state: &SigmaState) -> f64 {
    let z = state.coords();
    let hj = hamiltonian_generic(lat, &Jet2::vars(&z));
    let p = poisson_tensor(lat, &z);
    let rhs = sigma_rhs(lat, &z);
    let mut worst = 0.0f64;
    for (u, row) in p.iter().enumerate() {
        let b: f64 = row
            .iter()
            .enumerate()
            .map(|(w, puw)| puw * hj.grad(w))
            .sum();
        worst = worst.max((b - rhs[u]).abs());
    }
    worst
}

pub const CROSSCHECK_TOL: f64 = 1e-10;

/// Largest change from the initial value along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaConservation {
    pub hamiltonian: f64,
    pub total_l: f64,
    pub casimir: Vec<f64>,
}

impl SigmaConservation {
    pub fn max_casimir(&self) -> f64 {
        self.casimir.iter().fold(0.0f64, |m, x| m.max(*x))
    }

    pub fn max(&self) -> f64 {
        self.hamiltonian.max(self.total_l).max(self.max_casimir())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaRun {
    pub trajectory: OdeTrajectory,
    pub crosscheck: f64,
    pub conservation: SigmaConservation,
}

pub fn sigma_conservation(lat: &SigmaLattice, traj: &OdeTrajectory) -> Result<SigmaConservation> {
    let first = SigmaState::from_coords(lat, &traj.states[0])?;
    let (h0, l0) = (sigma_hamiltonian(&first, lat), first.total_l(lat));
    let mut out = SigmaConservation {
        hamiltonian: 0.0,
        total_l: 0.0,
        casimir: vec![0.0; lat.sites],
    };
    for z in &traj.states {
        let st = SigmaState::from_coords(lat, z)?;
        out.hamiltonian = out
            .hamiltonian
            .max((sigma_hamiltonian(&st, lat) - h0).abs());
        let l = st.total_l(lat);
        for a in 0..3 {
            out.total_l = out.total_l.max((l[a] - l0[a]).abs());
        }
        for (i, si) in st.s.iter().enumerate() {
            let c = norm_sq(&sub(si, &lat.lambda));
            out.casimir[i] = out.casimir[i].max((c - first.casimirs[i]).abs());
        }
    }
    Ok(out)
}

/// RK4 integration of the Lie–Poisson flow. The hand-written right-hand
/// side is checked against the jet bracket first; a mismatch aborts.
pub fn sigma_evolve(
    state: &SigmaState,
    lat: &SigmaLattice,
    t_final: f64,
    step: f64,
) -> Result<SigmaRun> {
    let crosscheck = sigma_rhs_crosscheck(lat, state);
    if !(crosscheck < CROSSCHECK_TOL) {
        return Err(Error::Numeric {
            message: "equations of motion disagree with the Poisson bracket".into(),
            residual: crosscheck,
        });
    }
    let trajectory = rk4_integrate(|_, z| Ok(sigma_rhs(lat, z)), &state.coords(), t_final, step)?;
    if let Some(e) = &trajectory.error {
        return Err(e.clone());
    }
    let conservation = sigma_conservation(lat, &trajectory)?;
    Ok(SigmaRun {
        trajectory,
        crosscheck,
        conservation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepHalving {
    pub coarse: SigmaConservation,
    pub fine: SigmaConservation,
    pub hamiltonian_ratio: f64,
    pub casimir_ratio: f64,
}

/// Drift at `step` over drift at `step / 2` for the quadratic invariants.
/// Total 𝕃 is linear and is preserved by RK4 up to roundoff, so it has no
/// meaningful ratio.
pub fn sigma_step_halving(
    state: &SigmaState,
    lat: &SigmaLattice,
    t_final: f64,
    step: f64,
) -> Result<StepHalving> {
    let coarse = sigma_evolve(state, lat, t_final, step)?.conservation;
    let fine = sigma_evolve(state, lat, t_final, step / 2.0)?.conservation;
    Ok(StepHalving {
        hamiltonian_ratio: coarse.hamiltonian / fine.hamiltonian,
        casimir_ratio: coarse.max_casimir() / fine.max_casimir(),
        coarse,
        fine,
    })
}

/// Relative orientation of the cocycle with respect to the pairing
/// `⟨λ, U θ U⁻¹ − θ⟩`; `−1` reproduces the algebra's central term, the
/// quantization form and the polarized wavefunctions.
pub const COCYCLE_ORIENTATION: f64 = -1.0;

/// `√(1 − ε²/4)`, the scalar part of the unit quaternion `(s, ε/2)`.
fn chart_scalar<S: Scalar>(e: &[S]) -> Result<S> {
    let e2 =
        e[0].clone() * e[0].clone() + e[1].clone() * e[1].clone() + e[2].clone() * e[2].clone();
    if !(e2.value() < 4.0) {
        return Err(Error::domain(
            "su2 chart",
            format!("|ε|² = {} must be below 4", e2.value()),
        ));
    }
    (S::constant(1.0) - e2 * 0.25).try_sqrt()
}

/// Rotation matrix of the ε chart: `R = (1 − ε²/2)I + ½εεᵀ + s[ε]_×`.
pub fn rotation<S: Scalar>(e: &[S]) -> Result<[[S; 3]; 3]> {
    let s = chart_scalar(e)?;
    let e2 =
        e[0].clone() * e[0].clone() + e[1].clone() * e[1].clone() + e[2].clone() * e[2].clone();
    let diag = S::constant(1.0) - e2 * 0.5;
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut r = e[i].clone() * e[j].clone() * 0.5;
            if i == j {
                r = r + diag.clone();
            }
            for k in 0..3 {
                let eta = levi_civita(i, j, k);
                if eta != 0.0 {
                    r = r - s.clone() * e[k].clone() * eta;
                }
            }
            r
        })
    }))
}

fn mat_vec<S: Scalar>(r: &[[S; 3]; 3], v: &[S]) -> [S; 3] {
    std::array::from_fn(|i| {
        r[i][0].clone() * v[0].clone()
            + r[i][1].clone() * v[1].clone()
            + r[i][2].clone() * v[2].clone()
    })
}

fn mat_t_vec<S: Scalar>(r: &[[S; 3]; 3], v: &[S]) -> [S; 3] {
    std::array::from_fn(|i| {
        r[0][i].clone() * v[0].clone()
            + r[1][i].clone() * v[1].clone()
            + r[2][i].clone() * v[2].clone()
    })
}

/// Quaternion product `(s', ε'/2)(s, ε/2)` in the ε chart.
fn compose_chart<S: Scalar>(left: &[S], right: &[S]) -> Result<[S; 3]> {
    let (sl, sr) = (chart_scalar(left)?, chart_scalar(right)?);
    Ok(std::array::from_fn(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        sl.clone() * right[i].clone()
            + sr.clone() * left[i].clone()
            + (left[j].clone() * right[k].clone() - left[k].clone() * right[j].clone()) * 0.5
    }))
}

/// The lattice local Euclidean group: per site an SU(2) element in the ε
/// chart and a Lie-algebra element `θ₀`, plus a central phase.
/// `(U', θ')(U, θ) = (U'U, U'θU'⁻¹ + θ')` with phase
/// `κΔ Σ_i ⟨λ, U'_iθ_iU'_i⁻¹ − θ_i⟩`.
#[derive(Debug, Clone)]
pub struct SigmaGroup {
    sites: usize,
    spacing: f64,
    lambda: Vec3,
    labels: Vec<String>,
}

impl SigmaGroup {
    pub fn new(sites: usize, spacing: f64, lambda: Vec3) -> Result<Self> {
        if sites == 0 || !(spacing > 0.0) {
            return Err(Error::Validation(
                "need at least one site and positive spacing".into(),
            ));
        }
        let mut labels = Vec::with_capacity(6 * sites + 1);
        for i in 0..sites {
            labels.extend((1..=3).map(|a| format!("eps{i}_{a}")));
            labels.extend((1..=3).map(|a| format!("theta{i}_{a}")));
        }
        labels.push("phase".into());
        Ok(SigmaGroup {
            sites,
            spacing,
            lambda,
            labels,
        })
    }

    fn cocycle_weight(&self) -> f64 {
        COCYCLE_ORIENTATION * self.spacing
    }

    fn compose<S: Scalar>(&self, left: &[S], right: &[S]) -> Result<Vec<S>> {
        let mut out = Vec::with_capacity(self.labels.len());
        let mut xi = S::constant(0.0);
        for i in 0..self.sites {
            let o = 6 * i;
            let eps = compose_chart(&left[o..o + 3], &right[o..o + 3])?;
            let r = rotation(&left[o..o + 3])?;
            let rt = mat_vec(&r, &right[o + 3..o + 6]);
            out.extend(eps);
            for a in 0..3 {
                xi = xi + (rt[a].clone() - right[o + 3 + a].clone()) * self.lambda[a];
                out.push(rt[a].clone() + left[o + 3 + a].clone());
            }
        }
        let p = 6 * self.sites;
        out.push(left[p].clone() + right[p].clone() + xi * self.cocycle_weight());
        Ok(out)
    }

    fn inverse<S: Scalar>(&self, g: &[S]) -> Result<Vec<S>> {
        let mut out = Vec::with_capacity(self.labels.len());
        let mut xi = S::constant(0.0);
        for i in 0..self.sites {
            let o = 6 * i;
            let r = rotation(&g[o..o + 3])?;
            let back = mat_t_vec(&r, &g[o + 3..o + 6]);
            out.extend(g[o..o + 3].iter().map(|x| -x.clone()));
            for a in 0..3 {
                xi = xi + (back[a].clone() - g[o + 3 + a].clone()) * self.lambda[a];
                out.push(-back[a].clone());
            }
        }
        let p = 6 * self.sites;
        out.push(-g[p].clone() - xi * self.cocycle_weight());
        Ok(out)
    }
}

impl GroupLaw for SigmaGroup {
    fn name(&self) -> &str {
        "local_euclidean_lattice"
    }
    fn labels(&self) -> &[String] {
        &self.labels
    }
    fn central(&self) -> usize {
        6 * self.sites
    }
    fn identity(&self) -> Vec<f64> {
        vec![0.0; self.labels.len()]
    }
    fn compose_real(&self, left: &[f64], right: &[f64]) -> Result<Vec<f64>> {
        self.compose(left, right)
    }
    fn compose_jet(&self, left: &[Jet2], right: &[Jet2]) -> Result<Vec<Jet2>> {
        self.compose(left, right)
    }
    fn inverse_real(&self, g: &[f64]) -> Option<Result<Vec<f64>>> {
        Some(self.inverse(g))
    }
    fn inverse_jet(&self, g: &[Jet2]) -> Option<Result<Vec<Jet2>>> {
        Some(self.inverse(g))
    }
    fn sample(&self, rng: &mut SampleRng) -> Vec<f64> {
        let balls: Vec<Vec<usize>> = (0..self.sites)
            .map(|i| (6 * i..6 * i + 3).collect())
            .collect();
        sampling::chart_point(rng, self.labels.len(), &balls)
    }
    fn description(&self) -> String {
        format!(
            "lattice local Euclidean group, N = {}, spacing {}, λ = {:?}",
            self.sites, self.spacing, self.lambda
        )
    }
}

pub fn sigma_group(sites: usize, spacing: f64, lambda: Vec3) -> Result<LieGroup> {
    Ok(LieGroup::new(SigmaGroup::new(sites, spacing, lambda)?))
}

fn eps_index(i: usize, a: usize) -> usize {
    6 * i + a
}

fn theta_index(i: usize, a: usize) -> usize {
    6 * i + 3 + a
}

/// The local Euclidean algebra in the functional basis, compared with
/// `[X_φa, X_φb] = −η X_φc δ/Δ`, `[X_φa, X_θb] = −η(X_θc − λ_c Ξ)δ/Δ`,
/// `[X_θ, X_θ] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalAlgebraReport {
    pub table: StructureTable,
    pub functional: StructureTable,
    pub rotation_family: f64,
    pub mixed_family: f64,
    pub translation_family: f64,
    /// Entries outside the three families, including cross-site ones.
    pub others: f64,
    /// Measured `C^phase_{φa, θb}` for `(a, b) = (1,2), (2,3), (3,1)` at
    /// site 0.
    pub central: Vec3,
}

impl LocalAlgebraReport {
    pub fn max_residual(&self) -> f64 {
        self.rotation_family
            .max(self.mixed_family)
            .max(self.translation_family)
            .max(self.others)
    }
}

pub fn sigma_local_group_fields(
    sites: usize,
    spacing: f64,
    lambda: Vec3,
) -> Result<LocalAlgebraReport> {
    if sites > 4 {
        return Err(Error::Argument(
            "the jet-based algebra check is limited to N ≤ 4".into(),
        ));
    }
    let group = sigma_group(sites, spacing, lambda)?;
    let table = structure_constants(&group)?;
    let dim = group.dim();
    let phase = dim - 1;
    let mut scales = vec![1.0 / spacing; dim];
    scales[phase] = 1.0;
    let functional = table.rescaled(&scales);
    let mut expected = StructureTable::zeros(functional.labels.clone());
    let mut family = vec![3u8; dim * dim * dim];
    let key = |a: usize, b: usize, c: usize| (a * dim + b) * dim + c;
    for i in 0..sites {
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let e = levi_civita(a, b, c);
                    let (ea, eb, ec) = (eps_index(i, a), eps_index(i, b), eps_index(i, c));
                    let (tb, tc) = (theta_index(i, b), theta_index(i, c));
                    if ea < eb {
                        expected.set(ea, eb, ec, -e / spacing);
                    }
                    expected.set(ea, tb, tc, -e / spacing);
                    family[key(ea, eb, ec)] = 0;
                    family[key(ea, tb, tc)] = 1;
                }
                let central: f64 = (0..3).map(|c| levi_civita(a, b, c) * lambda[c]).sum();
                expected.set(eps_index(i, a), theta_index(i, b), phase, central / spacing);
                family[key(eps_index(i, a), theta_index(i, b), phase)] = 1;
                for c in 0..3 {
                    let (ta, tb) = (theta_index(i, a), theta_index(i, b));
                    family[key(ta.min(tb), ta.max(tb), theta_index(i, c))] = 2;
                }
            }
        }
    }
    let mut res = [0.0f64; 4];
    for a in 0..dim {
        for b in a + 1..dim {
            for c in 0..dim {
                let r = (functional.get(a, b, c) - expected.get(a, b, c)).abs();
                let f = family[key(a, b, c)] as usize;
                res[f] = res[f].max(r);
            }
        }
    }
    let central = [(0, 1), (1, 2), (2, 0)]
        .map(|(a, b)| functional.get(eps_index(0, a), theta_index(0, b), phase));
    Ok(LocalAlgebraReport {
        table,
        functional,
        rotation_family: res[0],
        mixed_family: res[1],
        translation_family: res[2],
        others: res[3],
        central,
    })
}

/// Noether contractions `F_a = i_{X^R_a}Θ` at a group point, read per site
/// in the functional basis, next to their closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaNoether {
    pub theta: Vec<f64>,
    /// `Λ_i = U_i λ U_i⁻¹`.
    pub big_lambda: Vec<Vec3>,
    /// `F_{φ(x_i)}`.
    pub l_values: Vec<Vec3>,
    /// `F_{θ(x_i)}`.
    pub s_values: Vec<Vec3>,
    /// `max |F_φ − [Λ, θ₀]|`.
    pub l_residual: f64,
    /// `max |F_θ − (λ − Λ)|`, the contraction of `Θ_σ` with `∂/∂θ`.
    pub s_residual: f64,
    /// `max |F_θ − (Λ − λ)|`; nonzero whenever `Λ ≠ λ`.
    pub printed_s_residual: f64,
    /// `max |Θ − (−Δ Σ⟨Λ − λ, dθ⟩ + dphase)|`.
    pub theta_residual: f64,
    /// `max | ‖F_θ − λ‖ − ‖λ‖ |`.
    pub orbit_residual: f64,
}

pub fn sigma_theta_noether(
    sites: usize,
    spacing: f64,
    lambda: Vec3,
    g: &[f64],
) -> Result<SigmaNoether> {
    let group = sigma_group(sites, spacing, lambda)?;
    if g.len() != group.dim() {
        return Err(Error::Argument(format!(
            "expected a point of dimension {}",
            group.dim()
        )));
    }
    let th = theta(&group, g)?;
    let f = noether_invariants(&group, g)?;
    let mut out = SigmaNoether {
        theta: th.clone(),
        big_lambda: Vec::new(),
        l_values: Vec::new(),
        s_values: Vec::new(),
        l_residual: 0.0,
        s_residual: 0.0,
        printed_s_residual: 0.0,
        theta_residual: (th[6 * sites] - 1.0).abs(),
        orbit_residual: 0.0,
    };
    let lam_norm = norm_sq(&lambda).sqrt();
    for i in 0..sites {
        let r = rotation(&g[6 * i..6 * i + 3])?;
        let big = mat_vec(&r, &lambda);
        let th0: Vec3 = [
            g[theta_index(i, 0)],
            g[theta_index(i, 1)],
            g[theta_index(i, 2)],
        ];
        let l: Vec3 = std::array::from_fn(|a| f[eps_index(i, a)] / spacing);
        let s: Vec3 = std::array::from_fn(|a| f[theta_index(i, a)] / spacing);
        let l_closed = cross(&big, &th0);
        for a in 0..3 {
            out.l_residual = out.l_residual.max((l[a] - l_closed[a]).abs());
            out.s_residual = out.s_residual.max((s[a] - (lambda[a] - big[a])).abs());
            out.printed_s_residual = out
                .printed_s_residual
                .max((s[a] - (big[a] - lambda[a])).abs());
            out.theta_residual = out
                .theta_residual
                .max((th[theta_index(i, a)] + spacing * (big[a] - lambda[a])).abs())
                .max(th[eps_index(i, a)].abs());
        }
        out.orbit_residual = out
            .orbit_residual
            .max((norm_sq(&sub(&s, &lambda)).sqrt() - lam_norm).abs());
        out.big_lambda.push(big);
        out.l_values.push(l);
        out.s_values.push(s);
    }
    Ok(out)
}

/// Residuals of the polarization and U(1) conditions on
/// `Ψ = e^{i phase} e^{−iΔΣ⟨λ, U⁻¹θU − θ⟩} Φ(Λ − λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaPolarization {
    pub polarization: f64,
    pub u1: f64,
    pub samples: usize,
}

/// `test` is a polynomial in the `3N` components of `Λ − λ`. With
/// `drop_theta_phase` the θ-dependent exponent is left out.
pub fn sigma_polarization_check(
    sites: usize,
    spacing: f64,
    lambda: Vec3,
    test: &Poly,
    samples: usize,
    seed: u64,
    drop_theta_phase: bool,
) -> Result<SigmaPolarization> {
    if test.nvars() != 3 * sites {
        return Err(Error::Argument(format!(
            "test function must have {} variables",
            3 * sites
        )));
    }
    let group = sigma_group(sites, spacing, lambda)?;
    let mut rng = sampling::rng(seed);
    let phase = 6 * sites;
    let mut pol = 0.0f64;
    let mut u1 = 0.0f64;
    for _ in 0..samples {
        let g = group.sample(&mut rng);
        let v = Jet2::vars(&g);
        let mut beta = v[phase].clone();
        let mut args = Vec::with_capacity(3 * sites);
        for i in 0..sites {
            let r = rotation(&v[6 * i..6 * i + 3])?;
            let lam: Vec<Jet2> = lambda.iter().map(|&x| Jet2::constant(x)).collect();
            let big = mat_vec(&r, &lam);
            for a in 0..3 {
                let shifted = big[a].clone() - lambda[a];
                if !drop_theta_phase {
                    beta = beta - (&shifted * &v[theta_index(i, a)]).scale(spacing);
                }
                args.push(shifted);
            }
        }
        let phi = test.eval_scalar(&args)?;
        let frame = field_frame(&group, FieldKind::Left, &g)?;
        let apply = |x: &[f64]| -> (f64, f64) {
            let d_phi: f64 = x.iter().enumerate().map(|(j, c)| c * phi.grad(j)).sum();
            let d_beta: f64 = x.iter().enumerate().map(|(j, c)| c * beta.grad(j)).sum();
            (d_phi, d_beta)
        };
        let mut fields: Vec<Vec<f64>> = Vec::new();
        for i in 0..sites {
            let mut along = vec![0.0; group.dim()];
            for a in 0..3 {
                for (k, x) in frame.values[eps_index(i, a)].iter().enumerate() {
                    along[k] += lambda[a] * x;
                }
                fields.push(frame.values[theta_index(i, a)].clone());
            }
            fields.push(along);
        }
        for x in &fields {
            let (dp, db) = apply(x);
            pol = pol.max(dp.hypot(phi.value() * db));
        }
        let (dp, db) = apply(&frame.values[phase]);
        u1 = u1.max(dp.hypot(phi.value() * (db - 1.0)));
    }
    Ok(SigmaPolarization {
        polarization: pol,
        u1,
        samples,
    })
}

/// Operator realizations on functions of `s = 𝕊 ∈ ℝ³` (one site):
/// `Ŝ_a Φ = (s_a − λ_a)Φ`, `L̂_a Φ = η_abc s_b ∂Φ/∂s_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSuite {
    /// Max over test functions, pairs `(a, b)` and sample points of the
    /// difference between the exact polynomial commutator `[L̂_a, Ŝ_b]Φ`
    /// and the same commutator applied through jets.
    pub jet_residual: f64,
    /// Whether `[L̂_a, Ŝ_b] = −η_abc(Ŝ_c + λ_c)` holds exactly on every
    /// test function.
    pub exact_identity: bool,
    /// `[Ŝ_a, Ŝ_b]Φ == 0` exactly.
    pub s_commute: bool,
    /// `L̂_a(s·s) == 0` exactly.
    pub invariant_annihilated: bool,
    /// Measured constant term of `[L̂_a, Ŝ_b]` for `(1,2), (2,3), (3,1)`.
    pub central: Vec3,
    /// `deg ĤΦ ≤ deg Φ` for every test function, `Ĥ = ½ Σ L̂_a²`.
    pub degree_preserved: bool,
}

fn poly_l(a: usize, p: &Poly) -> Poly {
    let mut out = Poly::zero(3);
    for b in 0..3 {
        for c in 0..3 {
            let e = levi_civita(a, b, c);
            if e != 0.0 {
                let term = Poly::var(3, b).mul(&p.derivative(c));
                out = if e > 0.0 {
                    out.add(&term)
                } else {
                    out.sub(&term)
                };
            }
        }
    }
    out
}

pub fn sigma_operator_suite(
    lambda: Vec3,
    tests: &[Poly],
    samples: usize,
    seed: u64,
) -> Result<OperatorSuite> {
    let lam: Vec<BigRational> = lambda
        .iter()
        .map(|&x| {
            BigRational::from_float(x).ok_or_else(|| Error::Validation("λ must be finite".into()))
        })
        .collect::<Result<_>>()?;
    let s_op = |b: usize| Poly::var(3, b).sub(&Poly::constant(3, lam[b].clone()));
    let mut exact_identity = true;
    let mut s_commute = true;
    let mut degree_preserved = true;
    let mut jet_residual = 0.0f64;
    let mut rng = sampling::rng(seed);
    let points: Vec<Vec3> = (0..samples)
        .map(|_| std::array::from_fn(|_| sampling::uniform(&mut rng, -1.5, 1.5)))
        .collect();
    for p in tests {
        if p.nvars() != 3 {
            return Err(Error::Argument(
                "test functions take the three components of 𝕊".into(),
            ));
        }
        for a in 0..3 {
            for b in 0..3 {
                let comm = poly_l(a, &s_op(b).mul(p)).sub(&s_op(b).mul(&poly_l(a, p)));
                let mut predicted = Poly::zero(3);
                for c in 0..3 {
                    let e = levi_civita(a, b, c);
                    if e != 0.0 {
                        // −η(Ŝ_c + λ_c) = −η s_c
                        let t = Poly::var(3, c).mul(p);
                        predicted = if e > 0.0 {
                            predicted.sub(&t)
                        } else {
                            predicted.add(&t)
                        };
                    }
                }
                exact_identity &= comm.sub(&predicted).is_zero();
                let ss = s_op(a)
                    .mul(&s_op(b).mul(p))
                    .sub(&s_op(b).mul(&s_op(a).mul(p)));
                s_commute &= ss.is_zero();
                for x in &points {
                    let v = Jet2::vars(x);
                    let phi = p.eval_scalar(&v)?;
                    let sb = &(v[b].clone() - lambda[b]) * &phi;
                    let l_of = |j: &Jet2| -> f64 {
                        (0..3)
                            .flat_map(|d| (0..3).map(move |c| (d, c)))
                            .map(|(d, c)| levi_civita(a, d, c) * x[d] * j.grad(c))
                            .sum()
                    };
                    let via_jets = l_of(&sb) - (x[b] - lambda[b]) * l_of(&phi);
                    jet_residual = jet_residual.max((via_jets - comm.eval(x)).abs());
                }
            }
        }
        let mut h = Poly::zero(3);
        for a in 0..3 {
            h = h.add(&poly_l(a, &poly_l(a, p)));
        }
        degree_preserved &= match (h.degree(), p.degree()) {
            (Some(dh), Some(dp)) => dh <= dp,
            (None, _) => true,
            (Some(_), None) => false,
        };
    }
    let central = [(0, 1), (1, 2), (2, 0)].map(|(a, b)| {
        let comm = poly_l(a, &s_op(b));
        comm.eval(&lambda)
    });
    let ss = Poly::var(3, 0)
        .pow(2)
        .add(&Poly::var(3, 1).pow(2))
        .add(&Poly::var(3, 2).pow(2));
    let invariant_annihilated = (0..3).all(|a| poly_l(a, &ss).is_zero());
    Ok(OperatorSuite {
        jet_residual,
        exact_identity,
        s_commute,
        invariant_annihilated,
        central,
        degree_preserved,
    })
}
