use std::f64::consts::PI;

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::group_model::{GroupLaw, LieGroup};
use crate::jetcalc::{Jet2, Scalar};
use crate::lie_engine::{structure_constants, StructureTable};
use crate::sampling::{self, SampleRng};

/// A periodic 1-D lattice for a free scalar field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KgLattice {
    pub sites: usize,
    pub spacing: f64,
    pub mass: f64,
    pub c: f64,
}

impl KgLattice {
    pub fn new(sites: usize, spacing: f64, mass: f64) -> Result<Self> {
        let lat = KgLattice {
            sites,
            spacing,
            mass,
            c: 1.0,
        };
        lat.validate()?;
        Ok(lat)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites == 0 || self.sites > 64 {
            return Err(Error::Validation(format!(
                "sites must be in 1..=64, got {}",
                self.sites
            )));
        }
        if !(self.spacing > 0.0) || !(self.c > 0.0) {
            return Err(Error::Validation("spacing and c must be positive".into()));
        }
        if !(self.mass > 0.0) {
            return Err(Error::Validation(
                "mass must be positive so every mode frequency is".into(),
            ));
        }
        Ok(())
    }

    /// `Ω_j = √(m² + (2 − 2cos(2πj/N))/Δ²)`.
    pub fn omega(&self, j: usize) -> f64 {
        let th = 2.0 * PI * j as f64 / self.sites as f64;
        (self.mass * self.mass + (2.0 - 2.0 * th.cos()) / (self.spacing * self.spacing)).sqrt()
    }

    /// `m²δ_ij + Lap_ij` with `Lap` the positive periodic second difference.
    pub fn omega_squared_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.sites;
        let h2 = self.spacing * self.spacing;
        let mut out = vec![vec![0.0; n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            row[i] += self.mass * self.mass + 2.0 / h2;
            row[(i + 1) % n] -= 1.0 / h2;
            row[(i + n - 1) % n] -= 1.0 / h2;
        }
        out
    }

    /// 2×2 map of mode `j` after time `b`, acting on `(φ̂, φ̂dot)`.
    pub fn mode_map(&self, j: usize, b: f64) -> [[f64; 2]; 2] {
        let w = self.c * self.omega(j);
        let (s, c) = (b * w).sin_cos();
        [[c, s / w], [-w * s, c]]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KgState {
    pub phi: Vec<f64>,
    pub phidot: Vec<f64>,
}

impl KgState {
    pub fn new(phi: Vec<f64>, phidot: Vec<f64>) -> Result<Self> {
        if phi.len() != phidot.len() {
            return Err(Error::Argument(
                "φ and φdot must have the same length".into(),
            ));
        }
        if phi.iter().chain(&phidot).any(|x| !x.is_finite()) {
            return Err(Error::Validation("state entries must be finite".into()));
        }
        Ok(KgState { phi, phidot })
    }

    pub fn zeros(n: usize) -> Self {
        KgState {
            phi: vec![0.0; n],
            phidot: vec![0.0; n],
        }
    }
}

/// Circulant kernels of the time action, indexed by `(i − k) mod N`:
/// `cos(bcΩ)`, `sin(bcΩ)/(cΩ)` and `cΩ sin(bcΩ)` in position space.
fn kernels<S: Scalar>(lat: &KgLattice, b: &S) -> [Vec<S>; 3] {
    let n = lat.sites;
    let mut cs = vec![S::constant(0.0); n];
    let mut sn = vec![S::constant(0.0); n];
    let mut ws = vec![S::constant(0.0); n];
    for j in 0..n {
        let w = lat.c * lat.omega(j);
        let arg = b.clone() * w;
        let (cj, sj) = (arg.clone().cos(), arg.sin());
        for d in 0..n {
            let f = (2.0 * PI * (j * d) as f64 / n as f64).cos() / n as f64;
            cs[d] = cs[d].clone() + cj.clone() * f;
            sn[d] = sn[d].clone() + sj.clone() * (f / w);
            ws[d] = ws[d].clone() + sj.clone() * (f * w);
        }
    }
    [cs, sn, ws]
}

/// Applies the time action `U(b)` to `(φ, φdot)`.
fn time_action<S: Scalar>(lat: &KgLattice, b: &S, phi: &[S], phidot: &[S]) -> (Vec<S>, Vec<S>) {
    let n = lat.sites;
    let [cs, sn, ws] = kernels(lat, b);
    let mut out_phi = Vec::with_capacity(n);
    let mut out_dot = Vec::with_capacity(n);
    for i in 0..n {
        let mut p = S::constant(0.0);
        let mut q = S::constant(0.0);
        for k in 0..n {
            let d = (i + n - k) % n;
            p = p + cs[d].clone() * phi[k].clone() + sn[d].clone() * phidot[k].clone();
            q = q - ws[d].clone() * phi[k].clone() + cs[d].clone() * phidot[k].clone();
        }
        out_phi.push(p);
        out_dot.push(q);
    }
    (out_phi, out_dot)
}

/// Evolves a lattice state by time `b`, mode by mode.
pub fn kg_time_translate(lat: &KgLattice, s: &KgState, b: f64) -> Result<KgState> {
    lat.validate()?;
    if s.phi.len() != lat.sites {
        return Err(Error::Argument(format!(
            "state has {} sites, lattice {}",
            s.phi.len(),
            lat.sites
        )));
    }
    let (phi, phidot) = time_action(lat, &b, &s.phi, &s.phidot);
    Ok(KgState { phi, phidot })
}

/// `a_j = iΔ Σ_x e^{−ik_j x}(φdot(x) − ik⁰_j φ(x))`, `k⁰_j = cΩ_j`. Under
/// a time translation by `b` it picks up the factor `e^{−ik⁰_j b}`.
pub fn kg_noether_charge(lat: &KgLattice, s: &KgState, j: usize) -> Complex64 {
    let n = lat.sites;
    let k0 = lat.c * lat.omega(j);
    let i = Complex64::i();
    let mut acc = Complex64::new(0.0, 0.0);
    for x in 0..n {
        let e = Complex64::from_polar(1.0, -2.0 * PI * (j * x) as f64 / n as f64);
        acc += e * (s.phidot[x] - i * k0 * s.phi[x]);
    }
    i * lat.spacing * acc
}

/// The lattice field group: time translation `b`, field shifts
/// `(φ_i, φdot_i)` and a central phase. The cocycle is half the lattice
/// symplectic form, `½Δ Σ (ψdot φ − ψ φdot)` with `ψ = U(b)φ'`.
#[derive(Debug, Clone)]
pub struct KgGroup {
    lattice: KgLattice,
    labels: Vec<String>,
}

impl KgGroup {
    pub fn new(lattice: KgLattice) -> Result<Self> {
        lattice.validate()?;
        let n = lattice.sites;
        let mut labels = vec!["b".to_string()];
        labels.extend((0..n).map(|i| format!("phi{i}")));
        labels.extend((0..n).map(|i| format!("phidot{i}")));
        labels.push("phase".into());
        Ok(KgGroup { lattice, labels })
    }

    pub fn into_group(self) -> LieGroup {
        LieGroup::new(self)
    }

    fn compose<S: Scalar>(&self, left: &[S], right: &[S]) -> Vec<S> {
        let n = self.lattice.sites;
        let (fl, dl) = (&left[1..=n], &left[n + 1..=2 * n]);
        let (fr, dr) = (&right[1..=n], &right[n + 1..=2 * n]);
        let (up, ud) = time_action(&self.lattice, &right[0], fl, dl);
        let mut out = Vec::with_capacity(2 * n + 2);
        out.push(left[0].clone() + right[0].clone());
        let mut omega = S::constant(0.0);
        for i in 0..n {
            omega = omega + ud[i].clone() * fr[i].clone() - up[i].clone() * dr[i].clone();
        }
        for i in 0..n {
            out.push(up[i].clone() + fr[i].clone());
        }
        for i in 0..n {
            out.push(ud[i].clone() + dr[i].clone());
        }
        out.push(
            left[2 * n + 1].clone()
                + right[2 * n + 1].clone()
                + omega * (0.5 * self.lattice.spacing),
        );
        out
    }

    /// `(b, f, φ)⁻¹ = (−b, −U(−b)f, −φ)`; the cocycle of a pair `(−f, f)`
    /// vanishes.
    fn inverse<S: Scalar>(&self, g: &[S]) -> Vec<S> {
        let n = self.lattice.sites;
        let back = -g[0].clone();
        let (p, d) = time_action(&self.lattice, &back, &g[1..=n], &g[n + 1..=2 * n]);
        let mut out = vec![back];
        out.extend(p.into_iter().map(|x| -x));
        out.extend(d.into_iter().map(|x| -x));
        out.push(-g[2 * n + 1].clone());
        out
    }
}

impl GroupLaw for KgGroup {
    fn name(&self) -> &str {
        "kg_lattice"
    }
    fn labels(&self) -> &[String] {
        &self.labels
    }
    fn central(&self) -> usize {
        self.labels.len() - 1
    }
    fn identity(&self) -> Vec<f64> {
        vec![0.0; self.labels.len()]
    }
    fn compose_real(&self, left: &[f64], right: &[f64]) -> Result<Vec<f64>> {
        Ok(self.compose(left, right))
    }
    fn compose_jet(&self, left: &[Jet2], right: &[Jet2]) -> Result<Vec<Jet2>> {
        Ok(self.compose(left, right))
    }
    fn inverse_real(&self, g: &[f64]) -> Option<Result<Vec<f64>>> {
        Some(Ok(self.inverse(g)))
    }
    fn inverse_jet(&self, g: &[Jet2]) -> Option<Result<Vec<Jet2>>> {
        Some(Ok(self.inverse(g)))
    }
    fn evolution(&self) -> Option<usize> {
        Some(0)
    }
    fn sample(&self, rng: &mut SampleRng) -> Vec<f64> {
        sampling::chart_point(rng, self.labels.len(), &[])
    }
    fn description(&self) -> String {
        format!(
            "Klein-Gordon lattice group, N = {}, spacing {}, mass {}, c = {}",
            self.lattice.sites, self.lattice.spacing, self.lattice.mass, self.lattice.c
        )
    }
}

/// The three commutator families of the lattice field algebra, read in the
/// functional basis `X_{φ(x_i)} = (1/Δ) ∂/∂φ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct KgAlgebraReport {
    pub lattice: KgLattice,
    /// Coordinate-basis table from the jets.
    pub table: StructureTable,
    /// The same table in the functional basis.
    pub functional: StructureTable,
    /// `[X_b, X_{φ_i}] = −c²(m² + Lap)_{ji} X_{φdot_j}`.
    pub time_field: f64,
    /// `[X_b, X_{φdot_i}] = X_{φ_i}`.
    pub time_momentum: f64,
    /// `[X_{φ_i}, X_{φdot_j}] = (δ_ij/Δ) X_phase`.
    pub central: f64,
    /// Every other entry, which should vanish.
    pub others: f64,
    /// `[X_b, [X_b, X_{φdot_i}]] = −c²(m² + Lap)X_{φdot}` from the table.
    pub nested: f64,
    /// `C^phase_{φ_0, φdot_0}` in the functional basis.
    pub central_value: f64,
}

impl KgAlgebraReport {
    pub fn max_family_residual(&self) -> f64 {
        self.time_field
            .max(self.time_momentum)
            .max(self.central)
            .max(self.others)
    }
}

pub fn kg_group(lattice: KgLattice) -> Result<LieGroup> {
    Ok(KgGroup::new(lattice)?.into_group())
}

pub fn kg_group_fields(lattice: KgLattice) -> Result<KgAlgebraReport> {
    if lattice.sites > 16 {
        return Err(Error::Argument(
            "the jet-based algebra check is limited to N ≤ 16".into(),
        ));
    }
    let group = kg_group(lattice)?;
    let table = structure_constants(&group)?;
    let n = lattice.sites;
    let dim = 2 * n + 2;
    let mut scales = vec![1.0 / lattice.spacing; dim];
    scales[0] = 1.0;
    scales[dim - 1] = 1.0;
    let functional = table.rescaled(&scales);
    let k = lattice.omega_squared_matrix();
    let c2 = lattice.c * lattice.c;
    let phi = |i: usize| 1 + i;
    let dot = |i: usize| 1 + n + i;
    let phase = dim - 1;
    let mut expected = StructureTable::zeros(functional.labels.clone());
    for i in 0..n {
        for j in 0..n {
            expected.set(0, phi(i), dot(j), -c2 * k[j][i]);
            expected.set(
                phi(i),
                dot(j),
                phase,
                if i == j { 1.0 / lattice.spacing } else { 0.0 },
            );
        }
        expected.set(0, dot(i), phi(i), 1.0);
    }
    let mut fam = [0.0f64; 4];
    for a in 0..dim {
        for b in a + 1..dim {
            for c in 0..dim {
                let r = (functional.get(a, b, c) - expected.get(a, b, c)).abs();
                let which = match (a, b, c) {
                    (0, b, c) if (1..=n).contains(&b) && c > n && c < phase => 0,
                    (0, b, c) if b > n && b < phase && (1..=n).contains(&c) => 1,
                    (a, b, c) if (1..=n).contains(&a) && b > n && b < phase && c == phase => 2,
                    _ => 3,
                };
                fam[which] = fam[which].max(r);
            }
        }
    }
    let mut nested = 0.0f64;
    for i in 0..n {
        for d in 0..dim {
            let v: f64 = (0..dim)
                .map(|e| functional.get(0, dot(i), e) * functional.get(0, e, d))
                .sum();
            let expect = if d > n && d < phase {
                -c2 * k[d - n - 1][i]
            } else {
                0.0
            };
            nested = nested.max((v - expect).abs());
        }
    }
    let central_value = functional.get(phi(0), dot(0), phase);
    Ok(KgAlgebraReport {
        lattice,
        table,
        functional,
        time_field: fam[0],
        time_momentum: fam[1],
        central: fam[2],
        others: fam[3],
        nested,
        central_value,
    })
}

/// Which component along `∂/∂φ_ν` the symmetry field carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prolongation {
    /// `∂_ν` of the `∂/∂φ` component, `−k_ν e^{ikx}`.
    Derivative,
    /// The printed `−i k_ν e^{ikx}`.
    Printed,
}

/// Max over seeded samples of `|L_X ℒ − ∂_μβ^μ|` for the field
/// `X = ie^{ikx}∂_φ + (…)∂_{φ_ν}`, `ℒ = ½(φ_μφ^μ − m²φ²)` and
/// `β^μ = −k^μ e^{ikx}φ`, metric `(+,−,−,−)`. `k⁰ = √(m² + k⃗²) + off_shell`.
pub fn kg_semi_invariance_residual(
    mass: f64,
    samples: usize,
    seed: u64,
    off_shell: f64,
    prolongation: Prolongation,
) -> Result<f64> {
    let mut rng = sampling::rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let mut u = || sampling::uniform(&mut rng, -1.0, 1.0);
        let x = [u(), u(), u(), u()];
        let field = u();
        let grad_lower = [u(), u(), u(), u()];
        let kv = [u(), u(), u()];
        let k0 = (mass * mass + kv.iter().map(|v| v * v).sum::<f64>()).sqrt() + off_shell;
        let r = semi_invariance_at(
            mass,
            &x,
            field,
            &grad_lower,
            [k0, kv[0], kv[1], kv[2]],
            prolongation,
        )?;
        worst = worst.max(r);
    }
    Ok(worst)
}

const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// One point; `k_upper = (k⁰, k⃗)`, `grad_lower = φ_μ`.
pub fn semi_invariance_at(
    mass: f64,
    x: &[f64; 4],
    field: f64,
    grad_lower: &[f64; 4],
    k_upper: [f64; 4],
    prolongation: Prolongation,
) -> Result<f64> {
    let k_lower: [f64; 4] = std::array::from_fn(|m| METRIC[m] * k_upper[m]);
    let vars = Jet2::vars(&[x[0], x[1], x[2], x[3], field]);
    let mut kx = Jet2::constant(0.0);
    for m in 0..4 {
        kx += &vars[m].scale(k_lower[m]);
    }
    let (cos, sin) = (kx.clone().cos(), kx.sin());
    let phi = &vars[4];
    // i e^{ikx} = −sin + i cos; β^μ = −k^μ (cos + i sin) φ.
    let parts = [(sin.scale(-1.0), &cos * phi), (cos.clone(), &sin * phi)];
    let grad_upper: [f64; 4] = std::array::from_fn(|m| METRIC[m] * grad_lower[m]);
    let mut worst = 0.0f64;
    for (idx, (f, cos_or_sin_phi)) in parts.iter().enumerate() {
        let prolonged: [f64; 4] = match prolongation {
            Prolongation::Derivative => std::array::from_fn(|m| f.grad(m)),
            Prolongation::Printed => {
                // −k_ν i e^{ikx}: real part k_ν sin, imaginary part −k_ν cos.
                let base = if idx == 0 { sin.value() } else { -cos.value() };
                std::array::from_fn(|m| k_lower[m] * base)
            }
        };
        let mut lie = f.value() * (-mass * mass * field);
        for m in 0..4 {
            lie += prolonged[m] * grad_upper[m];
        }
        let mut div = 0.0;
        for m in 0..4 {
            let beta = cos_or_sin_phi.scale(-k_upper[m]);
            div += beta.grad(m) + beta.grad(4) * grad_lower[m];
        }
        worst = worst.max((lie - div).abs());
    }
    Ok(worst)
}
