use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::jetcalc::Jet2;
use crate::sampling;

/// A point `(ε, π)` of the SU(2) particle phase space, `|ε| < 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub eps: [f64; 3],
    pub pi: [f64; 3],
}

impl PhasePoint {
    pub fn new(eps: [f64; 3], pi: [f64; 3]) -> Result<Self> {
        let e2: f64 = eps.iter().map(|x| x * x).sum();
        if !(e2 < 4.0) {
            return Err(Error::domain(
                "su2 chart",
                format!("|ε|² = {e2} must be below 4"),
            ));
        }
        Ok(PhasePoint { eps, pi })
    }

    /// Jet variables in the order `ε1, ε2, ε3, π1, π2, π3`.
    pub fn jets(&self) -> Vec<Jet2> {
        let p = [
            self.eps[0],
            self.eps[1],
            self.eps[2],
            self.pi[0],
            self.pi[1],
            self.pi[2],
        ];
        Jet2::vars(&p)
    }
}

fn eps_sq(eps: &[f64; 3]) -> Result<f64> {
    let e2: f64 = eps.iter().map(|x| x * x).sum();
    if !(e2 < 4.0) {
        return Err(Error::domain(
            "su2 chart",
            format!("|ε|² = {e2} must be below 4"),
        ));
    }
    Ok(e2)
}

/// `g_ij = δ_ij + ε_i ε_j / (4(1 − ε²/4))`.
pub fn su2_metric(eps: &[f64; 3]) -> Result<Matrix3<f64>> {
    let s = 4.0 * (1.0 - eps_sq(eps)? / 4.0);
    Ok(Matrix3::from_fn(|i, j| {
        f64::from(u8::from(i == j)) + eps[i] * eps[j] / s
    }))
}

/// `g⁻¹ = I − ε εᵀ / 4`.
pub fn su2_inverse_metric(eps: &[f64; 3]) -> Result<Matrix3<f64>> {
    eps_sq(eps)?;
    Ok(Matrix3::from_fn(|i, j| {
        f64::from(u8::from(i == j)) - eps[i] * eps[j] / 4.0
    }))
}

/// `ℋ = ½ g⁻¹ π π`.
pub fn su2_hamiltonian(eps: &[f64; 3], pi: &[f64; 3]) -> Result<f64> {
    let gi = su2_inverse_metric(eps)?;
    let mut h = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            h += 0.5 * gi[(i, j)] * pi[i] * pi[j];
        }
    }
    Ok(h)
}

/// A phase-space function evaluated on the six jet variables.
pub type PhaseFn<'a> = &'a dyn Fn(&[Jet2]) -> Result<Jet2>;

/// `Σ_i (∂f/∂ε^i ∂g/∂π_i − ∂f/∂π_i ∂g/∂ε^i)` for already evaluated jets.
pub fn bracket_of_jets(f: &Jet2, g: &Jet2) -> f64 {
    (0..3)
        .map(|i| f.grad(i) * g.grad(3 + i) - f.grad(3 + i) * g.grad(i))
        .sum()
}

/// Gradient of `{f, g}` from the second-order parts of the jets.
pub fn bracket_gradient(f: &Jet2, g: &Jet2) -> [f64; 6] {
    std::array::from_fn(|k| {
        (0..3)
            .map(|i| {
                f.hess(i, k) * g.grad(3 + i) + f.grad(i) * g.hess(3 + i, k)
                    - f.hess(3 + i, k) * g.grad(i)
                    - f.grad(3 + i) * g.hess(i, k)
            })
            .sum()
    })
}

pub fn canonical_poisson_bracket(f: PhaseFn, g: PhaseFn, point: &PhasePoint) -> Result<f64> {
    let v = point.jets();
    Ok(bracket_of_jets(&f(&v)?, &g(&v)?))
}

/// `ℋ` on jets.
pub fn hamiltonian_jet(v: &[Jet2]) -> Result<Jet2> {
    let (eps, pi) = (&v[0..3], &v[3..6]);
    let ep = dot(eps, pi);
    let pp = dot(pi, pi);
    // ½(π·π − (ε·π)²/4)
    Ok(pp.scale(0.5) - (&ep * &ep).scale(0.125))
}

fn dot(a: &[Jet2], b: &[Jet2]) -> Jet2 {
    let mut acc = Jet2::constant(0.0);
    for (x, y) in a.iter().zip(b) {
        acc += &(x * y);
    }
    acc
}

/// The ten SO(3,2) generators `E, p⃗, k⃗, J⃗` on jets, in that order.
pub fn generator_jets(v: &[Jet2]) -> Result<Vec<Jet2>> {
    let (eps, pi) = (&v[0..3], &v[3..6]);
    let h = hamiltonian_jet(v)?;
    let root = h.scale(2.0).sqrt()?;
    let ep = dot(eps, pi);
    let mut out = Vec::with_capacity(10);
    out.push(root.scale(2.0));
    // p = 2 g⁻¹ π = 2π − ½ (ε·π) ε
    for i in 0..3 {
        out.push(pi[i].scale(2.0) - (&ep * &eps[i]).scale(0.5));
    }
    for e in eps {
        out.push(&root * e);
    }
    for k in 0..3 {
        let (a, b) = ((k + 1) % 3, (k + 2) % 3);
        out.push(&(&eps[a] * &pi[b]) - &(&eps[b] * &pi[a]));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdsGenerators {
    pub energy: f64,
    pub p: [f64; 3],
    pub k: [f64; 3],
    pub j: [f64; 3],
}

pub fn ads_generators(point: &PhasePoint) -> Result<AdsGenerators> {
    let h = su2_hamiltonian(&point.eps, &point.pi)?;
    if !(h > 0.0) {
        return Err(Error::domain(
            "ads_generators",
            "ℋ = 0: √(2ℋ) has no derivative",
        ));
    }
    let g = generator_jets(&point.jets())?;
    let val = |i: usize| g[i].value();
    Ok(AdsGenerators {
        energy: val(0),
        p: [val(1), val(2), val(3)],
        k: [val(4), val(5), val(6)],
        j: [val(7), val(8), val(9)],
    })
}

/// Generator names in [`generator_jets`] order.
pub const GENERATOR_NAMES: [&str; 10] = ["E", "p1", "p2", "p3", "k1", "k2", "k3", "J1", "J2", "J3"];

/// Expected bracket `{f, g} = Σ coeff·generator`.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub f: usize,
    pub g: usize,
    pub rhs: Vec<(f64, usize)>,
}

fn levi(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

const E: usize = 0;
const P: usize = 1;
const K: usize = 4;
const J: usize = 7;

/// The nine bracket families of SO(3,2). With `kk_sign = −1` this is the
/// anti-de Sitter algebra; `+1` gives the SO(4,1) variant of `{k, k}`.
pub fn so32_relations(kk_sign: f64) -> Vec<Relation> {
    let mut out = Vec::new();
    for i in 0..3 {
        out.push(Relation {
            f: E,
            g: P + i,
            rhs: vec![(1.0, K + i)],
        });
        out.push(Relation {
            f: E,
            g: K + i,
            rhs: vec![(-1.0, P + i)],
        });
        out.push(Relation {
            f: E,
            g: J + i,
            rhs: vec![],
        });
        for j in 0..3 {
            let delta = if i == j { vec![(1.0, E)] } else { vec![] };
            out.push(Relation {
                f: K + i,
                g: P + j,
                rhs: delta,
            });
            let eta = |base: usize, sign: f64| -> Vec<(f64, usize)> {
                (0..3)
                    .filter(|&k| levi(i, j, k) != 0.0)
                    .map(|k| (sign * levi(i, j, k), base + k))
                    .collect()
            };
            out.push(Relation {
                f: K + i,
                g: K + j,
                rhs: eta(J, kk_sign),
            });
            out.push(Relation {
                f: P + i,
                g: P + j,
                rhs: eta(J, -1.0),
            });
            out.push(Relation {
                f: J + i,
                g: J + j,
                rhs: eta(J, 1.0),
            });
            out.push(Relation {
                f: J + i,
                g: K + j,
                rhs: eta(K, 1.0),
            });
            out.push(Relation {
                f: J + i,
                g: P + j,
                rhs: eta(P, 1.0),
            });
        }
    }
    out
}

/// Samples with `|ε| < 1.5`, `π ∈ [−1, 1]³` and `ℋ > h_min`.
pub fn sample_phase_points(samples: usize, seed: u64, h_min: f64) -> Vec<PhasePoint> {
    let mut rng = sampling::rng(seed);
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let e = sampling::ball(&mut rng, 3, 1.5);
        let eps = [e[0], e[1], e[2]];
        let pi = std::array::from_fn(|_| sampling::uniform(&mut rng, -1.0, 1.0));
        if su2_hamiltonian(&eps, &pi).is_ok_and(|h| h > h_min) {
            out.push(PhasePoint { eps, pi });
        }
    }
    out
}

/// Max over seeded points of `|{f, g} − rhs|` across `relations`.
pub fn bracket_table_check(relations: &[Relation], samples: usize, seed: u64) -> Result<f64> {
    let mut worst = 0.0f64;
    for pt in sample_phase_points(samples, seed, 0.1) {
        let g = generator_jets(&pt.jets())?;
        for r in relations {
            let lhs = bracket_of_jets(&g[r.f], &g[r.g]);
            let rhs: f64 = r.rhs.iter().map(|(c, k)| c * g[*k].value()).sum();
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}

/// Residuals of the brackets of `ℋ` with the canonical coordinates at one
/// point: `{ℋ, ε^i} + g⁻¹π` and `{ℋ, π_i} − coeff·(ε·π)π_i`.
pub fn hamiltonian_bracket_residuals(point: &PhasePoint, pi_coeff: f64) -> Result<(f64, f64)> {
    let v = point.jets();
    let h = hamiltonian_jet(&v)?;
    let gi = su2_inverse_metric(&point.eps)?;
    let ep: f64 = (0..3).map(|i| point.eps[i] * point.pi[i]).sum();
    let mut r_eps = 0.0f64;
    let mut r_pi = 0.0f64;
    for i in 0..3 {
        let ginv_pi: f64 = (0..3).map(|j| gi[(i, j)] * point.pi[j]).sum();
        r_eps = r_eps.max((bracket_of_jets(&h, &v[i]) + ginv_pi).abs());
        r_pi = r_pi.max((bracket_of_jets(&h, &v[3 + i]) - pi_coeff * ep * point.pi[i]).abs());
    }
    Ok((r_eps, r_pi))
}
