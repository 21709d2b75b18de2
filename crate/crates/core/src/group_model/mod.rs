//! Executable Lie groups: the [`GroupLaw`] interface, GDF-backed groups,
//! the Newton inverse and the built-in catalog.

mod catalog;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

pub use catalog::{catalog, catalog_keys, CatalogEntry, CATALOG};

use crate::error::{Error, Result};
use crate::grouplang::GroupDefinition;
use crate::jetcalc::{linalg, Jet2, Scalar};
use crate::sampling::{self, SampleRng};

/// A composition law `g'' = g' * g` in chart coordinates.
///
/// Implementors provide plain and jet evaluation; everything else in the
/// engine is derived from these two.
pub trait GroupLaw: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn labels(&self) -> &[String];
    /// Index of the U(1) phase coordinate.
    fn central(&self) -> usize;
    fn identity(&self) -> Vec<f64>;
    fn compose_real(&self, left: &[f64], right: &[f64]) -> Result<Vec<f64>>;
    fn compose_jet(&self, left: &[Jet2], right: &[Jet2]) -> Result<Vec<Jet2>>;

    fn inverse_real(&self, _g: &[f64]) -> Option<Result<Vec<f64>>> {
        None
    }
    fn inverse_jet(&self, _g: &[Jet2]) -> Option<Result<Vec<Jet2>>> {
        None
    }
    /// Coordinate that advances at unit rate along characteristic flows.
    fn evolution(&self) -> Option<usize> {
        None
    }
    /// A random point inside the chart used for validation sweeps.
    fn sample(&self, rng: &mut SampleRng) -> Vec<f64> {
        sampling::chart_point(rng, self.labels().len(), &[])
    }
    fn description(&self) -> String {
        String::new()
    }
}

/// A group law bound to concrete parameter values.
#[derive(Clone)]
pub struct LieGroup {
    law: Arc<dyn GroupLaw>,
}

impl fmt::Debug for LieGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LieGroup({}, dim {})", self.name(), self.dim())
    }
}

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;

impl LieGroup {
    pub fn new(law: impl GroupLaw + 'static) -> Self {
        LieGroup { law: Arc::new(law) }
    }

    /// Builds a group from a definition, overriding default parameters with
    /// `params`, and re-validates the identity axiom.
    pub fn from_definition(def: GroupDefinition, params: &BTreeMap<String, f64>) -> Result<Self> {
        Ok(LieGroup::new(ExprGroup::bind(def, params, String::new())?))
    }

    pub fn law(&self) -> &dyn GroupLaw {
        self.law.as_ref()
    }

    pub fn name(&self) -> &str {
        self.law.name()
    }

    pub fn dim(&self) -> usize {
        self.law.labels().len()
    }

    pub fn labels(&self) -> &[String] {
        self.law.labels()
    }

    pub fn label_index(&self, label: &str) -> Result<usize> {
        self.labels()
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| {
                Error::Argument(format!("group {} has no coordinate '{label}'", self.name()))
            })
    }

    pub fn central(&self) -> usize {
        self.law.central()
    }

    pub fn identity(&self) -> Vec<f64> {
        self.law.identity()
    }

    pub fn evolution(&self) -> Option<usize> {
        self.law.evolution()
    }

    pub fn description(&self) -> String {
        self.law.description()
    }

    pub fn sample(&self, rng: &mut SampleRng) -> Vec<f64> {
        self.law.sample(rng)
    }

    pub fn compose<S: Scalar>(&self, left: &[S], right: &[S]) -> Result<Vec<S>> {
        let n = self.dim();
        if left.len() != n || right.len() != n {
            return Err(Error::Argument(format!(
                "compose expects two vectors of length {n}, got {} and {}",
                left.len(),
                right.len()
            )));
        }
        S::compose_with(self.law(), left, right)
    }

    /// Group inverse. Uses the law's closed form when available; otherwise
    /// Newton on `compose(h, g) = e` for the values, followed by two chord
    /// steps with the converged Jacobian, which makes the first and second
    /// order parts of a jet result exact.
    pub fn inverse<S: Scalar>(&self, g: &[S]) -> Result<Vec<S>> {
        if g.len() != self.dim() {
            return Err(Error::Argument(format!(
                "inverse expects a vector of length {}, got {}",
                self.dim(),
                g.len()
            )));
        }
        if let Some(r) = S::closed_inverse(self.law(), g) {
            return r;
        }
        let values: Vec<f64> = g.iter().map(Scalar::value).collect();
        let (h, jac) = self.newton_inverse(&values)?;
        let jac_inv = linalg::invert(&jac)?;
        let e = self.identity();
        let mut hs: Vec<S> = h.iter().map(|&v| S::constant(v)).collect();
        for _ in 0..2 {
            let f = self.compose(&hs, g)?;
            let resid: Vec<S> = f.into_iter().zip(&e).map(|(fi, ei)| fi - *ei).collect();
            hs = (0..hs.len())
                .map(|i| {
                    let mut acc = hs[i].clone();
                    for (j, rj) in resid.iter().enumerate() {
                        let a = jac_inv[(i, j)];
                        if a != 0.0 {
                            acc = acc - rj.clone() * a;
                        }
                    }
                    acc
                })
                .collect();
        }
        Ok(hs)
    }

    /// Newton iteration for `h` with `compose(h, g) = e`; returns `h` and
    /// the Jacobian `∂compose(h, g)/∂h` at the solution.
    fn newton_inverse(&self, g: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let n = self.dim();
        let e = self.identity();
        let scale = 1.0 + g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let gc: Vec<Jet2> = g.iter().map(|&v| Jet2::constant(v)).collect();
        let mut h = e.clone();
        let mut last = f64::INFINITY;
        for _ in 0..=NEWTON_MAX_ITER {
            let hj = Jet2::vars(&h);
            let f = self.law.compose_jet(&hj, &gc)?;
            let jac = DMatrix::from_fn(n, n, |i, j| f[i].grad(j));
            let resid = DVector::from_fn(n, |i, _| f[i].value() - e[i]);
            last = resid.amax();
            if last <= NEWTON_TOL * scale {
                return Ok((h, jac));
            }
            let step = linalg::solve(&jac, &resid)?;
            for i in 0..n {
                h[i] -= step[i];
            }
            if h.iter().any(|x| !x.is_finite()) {
                break;
            }
        }
        Err(Error::Numeric {
            message: format!("Newton inverse did not converge for group {}", self.name()),
            residual: last,
        })
    }

    /// Jacobian of the map `h ↦ compose(h, g)` or `h ↦ compose(g, h)` at `h`.
    pub fn translation_jacobian(
        &self,
        g: &[f64],
        h: &[f64],
        g_on_left: bool,
    ) -> Result<DMatrix<f64>> {
        let n = self.dim();
        let hj = Jet2::vars(h);
        let gc: Vec<Jet2> = g.iter().map(|&v| Jet2::constant(v)).collect();
        let f = if g_on_left {
            self.law.compose_jet(&gc, &hj)?
        } else {
            self.law.compose_jet(&hj, &gc)?
        };
        Ok(DMatrix::from_fn(n, n, |i, j| f[i].grad(j)))
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Max over seeded samples of ‖(g₁g₂)g₃ − g₁(g₂g₃)‖∞.
pub fn associativity_check(group: &LieGroup, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Argument(
            "associativity_check needs at least one sample".into(),
        ));
    }
    let mut rng = sampling::rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let g1 = group.sample(&mut rng);
        let g2 = group.sample(&mut rng);
        let g3 = group.sample(&mut rng);
        let lhs = group.compose(&group.compose(&g1, &g2)?, &g3)?;
        let rhs = group.compose(&g1, &group.compose(&g2, &g3)?)?;
        worst = worst.max(sup_diff(&lhs, &rhs));
    }
    Ok(worst)
}

/// Residuals of the group axioms over seeded samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomResiduals {
    pub identity: f64,
    pub inverse: f64,
    pub associativity: f64,
}

impl AxiomResiduals {
    pub fn max(&self) -> f64 {
        self.identity.max(self.inverse).max(self.associativity)
    }
}

pub fn axiom_check(group: &LieGroup, samples: usize, seed: u64) -> Result<AxiomResiduals> {
    let mut rng = sampling::rng(seed);
    let e = group.identity();
    let (mut id, mut inv) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let g = group.sample(&mut rng);
        id = id
            .max(sup_diff(&group.compose(&e, &g)?, &g))
            .max(sup_diff(&group.compose(&g, &e)?, &g));
        let gi = group.inverse(&g)?;
        inv = inv
            .max(sup_diff(&group.compose(&gi, &g)?, &e))
            .max(sup_diff(&group.compose(&g, &gi)?, &e));
    }
    Ok(AxiomResiduals {
        identity: id,
        inverse: inv,
        associativity: associativity_check(group, samples, seed ^ 0x9e37_79b9)?,
    })
}

/// A group whose law is given by parsed GDF expressions.
#[derive(Debug, Clone)]
pub struct ExprGroup {
    def: GroupDefinition,
    params: Vec<f64>,
    description: String,
}

impl ExprGroup {
    pub fn bind(
        def: GroupDefinition,
        params: &BTreeMap<String, f64>,
        description: String,
    ) -> Result<Self> {
        let mut values = def.default_params();
        for (k, v) in params {
            let i = def.params.iter().position(|(n, _)| n == k).ok_or_else(|| {
                Error::Argument(format!("group {} has no parameter '{k}'", def.name))
            })?;
            values[i] = *v;
        }
        def.validate_identity(&values)?;
        Ok(ExprGroup {
            def,
            params: values,
            description,
        })
    }

    pub fn definition(&self) -> &GroupDefinition {
        &self.def
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }
}

impl GroupLaw for ExprGroup {
    fn name(&self) -> &str {
        &self.def.name
    }
    fn labels(&self) -> &[String] {
        &self.def.coords
    }
    fn central(&self) -> usize {
        self.def.central
    }
    fn identity(&self) -> Vec<f64> {
        self.def.identity.clone()
    }
    fn compose_real(&self, left: &[f64], right: &[f64]) -> Result<Vec<f64>> {
        self.def.compose(left, right, &self.params)
    }
    fn compose_jet(&self, left: &[Jet2], right: &[Jet2]) -> Result<Vec<Jet2>> {
        self.def.compose(left, right, &self.params)
    }
    fn inverse_real(&self, g: &[f64]) -> Option<Result<Vec<f64>>> {
        self.def.eval_inverse(g, &self.params)
    }
    fn inverse_jet(&self, g: &[Jet2]) -> Option<Result<Vec<Jet2>>> {
        self.def.eval_inverse(g, &self.params)
    }
    fn evolution(&self) -> Option<usize> {
        self.def.time
    }
    fn sample(&self, rng: &mut SampleRng) -> Vec<f64> {
        sampling::chart_point(rng, self.def.dim(), &self.def.balls)
    }
    fn description(&self) -> String {
        self.description.clone()
    }
}
