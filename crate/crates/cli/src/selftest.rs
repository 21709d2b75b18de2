//! The acceptance suite: every criterion is a deterministic function of
//! fixed seeds, and a runner that filters, times and reports them.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use gaq_core::dynamics::{
    conservation_report, em_equations_of_motion, flow_characteristic, gem_equivalence_check,
    gyration_period, FieldConfig, GemConvention,
};
use gaq_core::field_lattice::{
    kg_group_fields, kg_noether_charge, kg_semi_invariance_residual, kg_time_translate,
    sigma_evolve, sigma_group, sigma_local_group_fields, sigma_operator_suite,
    sigma_polarization_check, sigma_step_halving, sigma_theta_noether, KgLattice, KgState,
    Prolongation, SigmaLattice, SigmaState, Vec3,
};
use gaq_core::group_model::{catalog, LieGroup};
use gaq_core::jetcalc::rk4_integrate;
use gaq_core::lie_engine::{
    characteristic_kernel, equivalence_check, invariance_suite, parse_param_table,
    structure_constants, theta, Poly, StructureTable, GRAVITY_CONTRACTED_TABLE, GRAVITY_FULL_TABLE,
};
use gaq_core::quantum_gallery::{
    ads_eigen_consistency, bracket_table_check, galilei_operator_suite,
    galilei_polarization_residual, gaussian_solution, so32_relations, standard_grid, AdsParams,
    BoxReading, EIGEN_SPREAD_TOL,
};
use gaq_core::sampling;
use serde_json::{json, Map, Value};

use crate::report::{num, to_json};

/// What a criterion measured. `metrics` goes into the JSON report and must
/// not contain timings.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub summary: String,
    pub metrics: Map<String, Value>,
}

type Check = fn() -> gaq_core::Result<Outcome>;

#[derive(Debug, Clone, Copy)]
pub struct Criterion {
    pub id: u8,
    pub key: &'static str,
    pub title: &'static str,
    /// Wall-clock budget in seconds, part of the pass condition.
    pub budget: Option<f64>,
    check: Check,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub key: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub summary: String,
    pub metrics: Map<String, Value>,
    pub budget: Option<f64>,
    pub seconds: f64,
}

impl CriterionResult {
    /// One status line, e.g. `PASS [01] galilei-structure (0.01 s): …`.
    pub fn line(&self) -> String {
        format!(
            "{} [{:02}] {} ({:.2} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.key,
            self.seconds,
            self.summary
        )
    }

    /// The deterministic part of the result.
    pub fn to_value(&self) -> Value {
        json!({
            "id": self.id,
            "key": self.key,
            "title": self.title,
            "passed": self.passed,
            "summary": self.summary,
            "metrics": Value::Object(self.metrics.clone()),
            "budget_seconds": self.budget.map(num).unwrap_or(Value::Null),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub filter: Option<String>,
    pub results: Vec<CriterionResult>,
    pub seconds: f64,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn to_value(&self) -> Value {
        json!({
            "filter": self.filter,
            "passed": self.passed(),
            "criteria": self.results.iter().map(CriterionResult::to_value).collect::<Vec<_>>(),
        })
    }
}

fn metrics<const N: usize>(pairs: [(&str, Value); N]) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn galilei(m: f64) -> gaq_core::Result<LieGroup> {
    catalog("galilei_ext_1p1", &params(&[("m", m), ("hbar", 1.0)]))
}

fn em(m: f64, q: f64) -> gaq_core::Result<LieGroup> {
    catalog(
        "galilei_em_3p1",
        &params(&[("m", m), ("q", q), ("hbar", 1.0)]),
    )
}

fn galilei_structure() -> gaq_core::Result<Outcome> {
    let table = structure_constants(&galilei(1.0)?)?;
    let mut expected = StructureTable::zeros(table.labels.clone());
    let idx = |l: &str| table.label_index(l);
    expected.set(idx("t")?, idx("v")?, idx("x")?, 1.0);
    expected.set(idx("x")?, idx("v")?, idx("phi")?, -1.0);
    let residual = table.max_diff(&expected);
    let tol = 1e-10;
    Ok(Outcome {
        passed: residual < tol,
        summary: format!(
            "C^x_tv = {}, C^phi_xv = {}, max |C - expected| = {residual:.1e} (tol {tol:.0e})",
            table.get(0, 2, 1),
            table.get(1, 2, 3)
        ),
        metrics: metrics([
            ("residual", num(residual)),
            ("tol", num(tol)),
            ("jacobi", num(table.max_jacobi_residual())),
        ]),
    })
}

fn invariance() -> gaq_core::Result<Outcome> {
    let tol = 1e-8;
    let a = invariance_suite(&galilei(1.0)?, 32, 1)?;
    let b = invariance_suite(&em(1.0, 1.0)?, 32, 2)?;
    let worst = a.max().max(b.max());
    let skipped = a.skipped.len() + b.skipped.len();
    Ok(Outcome {
        passed: worst < tol && skipped == 0,
        summary: format!(
            "galilei {:.1e}, galilei_em {:.1e} over 32 points each, {skipped} skipped (tol {tol:.0e})",
            a.max(),
            b.max()
        ),
        metrics: metrics([
            ("galilei_max", num(a.max())),
            ("em_max", num(b.max())),
            ("samples", json!(32)),
            ("tol", num(tol)),
        ]),
    })
}

fn theta_closed_forms() -> gaq_core::Result<Outcome> {
    let (m, q) = (1.3, 0.7);
    let tol = 1e-9;
    let gal = galilei(m)?;
    let mut rng = sampling::rng(7);
    let mut gal_res = 0.0f64;
    for _ in 0..16 {
        let p = gal.sample(&mut rng);
        let th = theta(&gal, &p)?;
        let want = [-0.5 * m * p[2] * p[2], 0.0, -m * p[1], 1.0];
        gal_res = th
            .iter()
            .zip(want)
            .fold(gal_res, |r, (a, b)| r.max((a - b).abs()));
    }
    let grp = em(m, q)?;
    let mut em_res = 0.0f64;
    for _ in 0..16 {
        let p = grp.sample(&mut rng);
        let th = theta(&grp, &p)?;
        let (x, v, a_t) = (&p[1..4], &p[4..7], p[10]);
        let v2: f64 = v.iter().map(|u| u * u).sum();
        let mut want = vec![0.0; 12];
        want[0] = -(0.5 * m * v2 + q * a_t);
        for i in 0..3 {
            want[4 + i] = -m * x[i];
            want[7 + i] = -q * x[i];
        }
        want[11] = 1.0;
        em_res = th
            .iter()
            .zip(&want)
            .fold(em_res, |r, (a, b)| r.max((a - b).abs()));
    }
    Ok(Outcome {
        passed: gal_res < tol && em_res < tol,
        summary: format!("m = {m}, q = {q}: galilei {gal_res:.1e}, galilei_em {em_res:.1e} at 16 points each (tol {tol:.0e})"),
        metrics: metrics([("galilei", num(gal_res)), ("em", num(em_res)), ("samples", json!(16)), ("tol", num(tol))]),
    })
}

fn kernel_noether() -> gaq_core::Result<Outcome> {
    let m = 1.0;
    let g = galilei(m)?;
    let mut rng = sampling::rng(5);
    let mut worst = 0.0f64;
    let mut dims_ok = true;
    for _ in 0..16 {
        let p = g.sample(&mut rng);
        let ns = characteristic_kernel(&g, &p, 1e-8)?;
        if ns.dim() != 1 {
            dims_ok = false;
            continue;
        }
        let k = &ns.basis[0];
        let v = p[2];
        let want = [1.0, v, 0.0, 0.5 * m * v * v];
        let norm = |u: &[f64]| u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (nk, nw) = (norm(k), norm(&want));
        let dot: f64 = k.iter().zip(want).map(|(a, b)| a * b).sum();
        let sign = dot.signum();
        let dev = k
            .iter()
            .zip(want)
            .map(|(a, b)| (sign * a / nk - b / nw).abs())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
    }
    let traj = flow_characteristic(&g, &[0.0, 0.5, 1.2, 0.1], 10.0, 1e-3)?;
    let drift = conservation_report(&g, &traj)?.max_drift();
    let passed = dims_ok && worst < 1e-9 && drift < 1e-8 && traj.is_complete();
    Ok(Outcome {
        passed,
        summary: format!(
            "kernel dim 1 at 16 points: {dims_ok}, max deviation from (1, v, 0, mv^2/2) {worst:.1e} (tol 1e-9); Noether drift over t in [0, 10], step 1e-3: {drift:.1e} (tol 1e-8)"
        ),
        metrics: metrics([
            ("kernel_dims_ok", json!(dims_ok)),
            ("kernel_deviation", num(worst)),
            ("noether_drift", num(drift)),
            ("samples", json!(16)),
        ]),
    })
}

fn lorentz_force() -> gaq_core::Result<Outcome> {
    let cfg = FieldConfig::parse("A1 = -y\nA2 = x")?;
    let (q, m, b) = (1.5, 0.75, 2.0);
    let period = 2.0 * PI * m / (q * b);
    let speed = 0.6;
    let radius = speed * m / (q * b);
    let f = em_equations_of_motion(&cfg, q, m)?;
    let tr = rk4_integrate(
        &f,
        &[radius, 0.0, 0.0, 0.0, -speed, 0.0],
        1.2 * period,
        1e-3,
    )?;
    let measured = gyration_period(&tr).unwrap_or(f64::NAN);
    let rel = (measured - period).abs() / period;

    let ecfg = FieldConfig::parse("A0 = -0.8*x")?;
    let (qe, me) = (2.0, 0.5);
    let fe = em_equations_of_motion(&ecfg, qe, me)?;
    let v0 = [0.1, 0.2, 0.0];
    let te = rk4_integrate(&fe, &[0.0, 0.0, 0.0, v0[0], v0[1], v0[2]], 1.0, 1e-3)?;
    let accel = qe * 0.8 / me;
    let mut e_res = 0.0f64;
    for (t, s) in te.times.iter().zip(&te.states) {
        let want = [
            v0[0] * t + 0.5 * accel * t * t,
            v0[1] * t,
            0.0,
            v0[0] + accel * t,
            v0[1],
            0.0,
        ];
        e_res = s
            .iter()
            .zip(want)
            .fold(e_res, |r, (a, b)| r.max((a - b).abs()));
    }
    Ok(Outcome {
        passed: rel < 1e-5 && e_res < 1e-9,
        summary: format!(
            "cyclotron period {measured:.10} vs 2 pi m/(qB) = {period:.10}, relative {rel:.1e} (tol 1e-5); uniform E max error {e_res:.1e} (tol 1e-9)"
        ),
        metrics: metrics([
            ("period", num(measured)),
            ("period_expected", num(period)),
            ("period_relative_error", num(rel)),
            ("uniform_e_error", num(e_res)),
        ]),
    })
}

fn jacobi_equivalence() -> gaq_core::Result<Outcome> {
    let table = parse_param_table(GRAVITY_CONTRACTED_TABLE)?;
    let r = equivalence_check(&table)?;
    let full = equivalence_check(&parse_param_table(GRAVITY_FULL_TABLE)?)?;
    Ok(Outcome {
        passed: r.holds(),
        summary: format!(
            "free: {}; at g = mc: {} nonzero; at g = 2mc: {} nonzero (full printed table keeps {} at g = mc, see report)",
            r.free.join(", "),
            r.at_mc.len(),
            r.at_2mc.len(),
            full.at_mc.len()
        ),
        metrics: metrics([
            ("free", json!(r.free)),
            ("at_mc", json!(r.at_mc)),
            ("at_2mc", json!(r.at_2mc)),
            ("full_table_at_mc", json!(full.at_mc)),
        ]),
    })
}

pub const GEM_FIELD: &str =
    "h00 = 0.3*x*y - 0.2*t*z\nh1 = 0.2*y + 0.1*t*z^2\nh2 = -0.3*x^2 + 0.5*y*z\nh3 = 0.1*x*y + 0.4*t";

fn gem_convention() -> gaq_core::Result<Outcome> {
    let cfg = FieldConfig::parse(GEM_FIELD)?;
    let a = gem_equivalence_check(&cfg, 64, 1)?;
    let b = gem_equivalence_check(&cfg, 64, 99)?;
    let stable = a.best == b.best && b.unique();
    let residuals: Map<String, Value> = a
        .residuals
        .iter()
        .map(|(c, r)| (c.describe(), num(*r)))
        .collect();
    Ok(Outcome {
        passed: a.unique() && stable,
        summary: format!(
            "{} of 4 conventions agree to {:.0e} on 64 samples; selected {} (seed 1 and 99 agree: {stable}); printed reading residual {:.2e}",
            a.passing,
            a.tol,
            a.best.describe(),
            a.residual_of(GemConvention::PRINTED)
        ),
        metrics: metrics([
            ("passing", json!(a.passing)),
            ("selected", json!(a.best.describe())),
            ("residuals", Value::Object(residuals)),
            ("seed_stable", json!(stable)),
            ("samples", json!(64)),
        ]),
    })
}

fn so32_closure() -> gaq_core::Result<Outcome> {
    let good = bracket_table_check(&so32_relations(-1.0), 64, 1)?;
    let flipped = bracket_table_check(&so32_relations(1.0), 64, 1)?;
    Ok(Outcome {
        passed: good < 1e-7 && flipped > 0.1,
        summary: format!("nine families at 64 points with H > 0.1: {good:.1e} (tol 1e-7); flipped {{k,k}}: {flipped:.2e} (> 0.1)"),
        metrics: metrics([("residual", num(good)), ("flipped", num(flipped)), ("samples", json!(64))]),
    })
}

fn ads_eigen() -> gaq_core::Result<Outcome> {
    let p = AdsParams::default();
    let states = [(0, 0, 0), (1, 0, 0), (0, 1, 0)];
    let rep = ads_eigen_consistency(&p, BoxReading::Consistent, &states, 32, 11)?;
    let printed = ads_eigen_consistency(&p, BoxReading::Printed, &states, 32, 11)?;
    let sign = rep.selected_sign(EIGEN_SPREAD_TOL);
    let mut worst_rv = 0.0f64;
    let mut worst_spread = 0.0f64;
    if let Some(s) = sign {
        for st in &rep.states {
            if let Some(e) = st.stats(s) {
                worst_rv = worst_rv.max(e.relative_variance);
                worst_spread = worst_spread.max(e.spread);
            }
        }
    }
    let passed = sign.is_some() && worst_rv < 1e-6 && worst_spread < EIGEN_SPREAD_TOL;
    Ok(Outcome {
        passed,
        summary: format!(
            "consistent reading: cross_sign {}, variance/|mean| {worst_rv:.1e} (tol 1e-6), scale-relative spread {worst_spread:.1e}; printed reading selects {}",
            sign.map_or("none".to_string(), |s| format!("{s:+}")),
            printed.selected_sign(EIGEN_SPREAD_TOL).map_or("no sign".to_string(), |s| format!("{s:+}"))
        ),
        metrics: metrics([
            ("cross_sign", sign.map_or(Value::Null, num)),
            ("relative_variance", num(worst_rv)),
            ("spread", num(worst_spread)),
            ("samples_per_state", json!(32)),
        ]),
    })
}

fn galilei_quantum() -> gaq_core::Result<Outcome> {
    let g = galilei(1.0)?;
    let sec = standard_grid(gaussian_solution(1.0))?;
    let pol = galilei_polarization_residual(&g, &sec)?;
    let ops = galilei_operator_suite(&g, &sec, 1.0)?;
    Ok(Outcome {
        passed: pol.schrodinger < 1e-8 && ops.commutator < 1e-6,
        summary: format!(
            "Schrodinger residual {:.1e} over {} interior points (tol 1e-8); [X_x, X_v] + m i residual {:.1e} (tol 1e-6)",
            pol.schrodinger, pol.interior_points, ops.commutator
        ),
        metrics: metrics([
            ("schrodinger", num(pol.schrodinger)),
            ("commutator", num(ops.commutator)),
            ("interior_points", json!(pol.interior_points)),
        ]),
    })
}

fn kg_lattice() -> gaq_core::Result<Outcome> {
    let (mut det, mut additive, mut families, mut modulus, mut phase) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for n in 4..=16 {
        let lat = KgLattice::new(n, 1.0, 1.0)?;
        for j in 0..n {
            for b in [0.37, 2.0, -5.1] {
                let m = lat.mode_map(j, b);
                det = det.max((m[0][0] * m[1][1] - m[0][1] * m[1][0] - 1.0).abs());
            }
        }
        let mut rng = sampling::rng(n as u64);
        let mut draw = || {
            (0..n)
                .map(|_| sampling::uniform(&mut rng, -1.0, 1.0))
                .collect::<Vec<_>>()
        };
        let s = KgState::new(draw(), draw())?;
        let two = kg_time_translate(&lat, &kg_time_translate(&lat, &s, 0.4)?, 0.9)?;
        let one = kg_time_translate(&lat, &s, 1.3)?;
        for i in 0..n {
            additive = additive
                .max((two.phi[i] - one.phi[i]).abs())
                .max((two.phidot[i] - one.phidot[i]).abs());
        }
        let r = kg_group_fields(lat)?;
        families = families
            .max(r.max_family_residual())
            .max((r.central_value - 1.0).abs());
        let b = 1.7;
        let moved = kg_time_translate(&lat, &s, b)?;
        for j in 0..n {
            let (a0, a1) = (
                kg_noether_charge(&lat, &s, j),
                kg_noether_charge(&lat, &moved, j),
            );
            modulus = modulus.max((a0.norm() - a1.norm()).abs());
            let advance = (a0 / a1).arg();
            let expect = lat.c * lat.omega(j) * b;
            let diff = (advance - expect + PI).rem_euclid(2.0 * PI) - PI;
            phase = phase.max(diff.abs());
        }
    }
    Ok(Outcome {
        passed: det < 1e-12 && additive < 1e-10 && families < 1e-9 && modulus < 1e-10 && phase < 1e-9,
        summary: format!(
            "N = 4..16: det {det:.1e} (1e-12), additivity {additive:.1e} (1e-10), three families incl. delta/Delta {families:.1e} (1e-9), |a_j| {modulus:.1e} (1e-10), phase advance {phase:.1e} (1e-9)"
        ),
        metrics: metrics([
            ("det", num(det)),
            ("additivity", num(additive)),
            ("families", num(families)),
            ("charge_modulus", num(modulus)),
            ("phase_advance", num(phase)),
        ]),
    })
}

fn kg_semi() -> gaq_core::Result<Outcome> {
    let on = kg_semi_invariance_residual(1.2, 64, 5, 0.0, Prolongation::Derivative)?;
    let off = kg_semi_invariance_residual(1.2, 64, 5, 0.3, Prolongation::Derivative)?;
    Ok(Outcome {
        passed: on < 1e-10 && off > 1e-2,
        summary: format!(
            "on-shell {on:.1e} over 64 samples (tol 1e-10); off-shell k0 + 0.3: {off:.2e} (> 1e-2)"
        ),
        metrics: metrics([
            ("on_shell", num(on)),
            ("off_shell", num(off)),
            ("samples", json!(64)),
        ]),
    })
}

/// Default sigma-lattice run used by the acceptance suite and the CLI.
pub const SIGMA_SITES: usize = 8;
pub const SIGMA_SPACING: f64 = 0.4;
pub const SIGMA_LAMBDA: Vec3 = [0.0, 0.0, 0.7];
pub const SIGMA_SEED: u64 = 1;

fn sigma_dynamics() -> gaq_core::Result<Outcome> {
    let lat = SigmaLattice::new(SIGMA_SITES, SIGMA_SPACING, SIGMA_LAMBDA)?;
    let st = SigmaState::random(&lat, SIGMA_SEED, 1.0)?;
    let run = sigma_evolve(&st, &lat, 1.0, 1e-3)?;
    let c = &run.conservation;
    let halving = sigma_step_halving(&st, &lat, 1.0, 1e-3)?;
    let in_band = |r: f64| (12.0..=20.0).contains(&r);
    let passed =
        c.max() < 1e-8 && in_band(halving.hamiltonian_ratio) && in_band(halving.casimir_ratio);
    Ok(Outcome {
        passed,
        summary: format!(
            "N = 8, T = 1, step 1e-3: drift H {:.1e}, total L {:.1e}, Casimirs {:.1e} (tol 1e-8); halving ratio H {:.2}, Casimirs {:.2} (band [12, 20]; total L is linear and exact up to roundoff)",
            c.hamiltonian,
            c.total_l,
            c.max_casimir(),
            halving.hamiltonian_ratio,
            halving.casimir_ratio
        ),
        metrics: metrics([
            ("hamiltonian_drift", num(c.hamiltonian)),
            ("total_l_drift", num(c.total_l)),
            ("casimir_drift", num(c.max_casimir())),
            ("hamiltonian_ratio", num(halving.hamiltonian_ratio)),
            ("casimir_ratio", num(halving.casimir_ratio)),
            ("crosscheck", num(run.crosscheck)),
        ]),
    })
}

fn local_euclidean() -> gaq_core::Result<Outcome> {
    let lam = [0.3, -0.2, 0.9];
    let mut algebra = 0.0f64;
    let (mut s_res, mut l_res, mut printed_s) = (0.0f64, 0.0f64, 0.0f64);
    let (mut pol, mut control) = (0.0f64, f64::INFINITY);
    for (n, dx) in [(1usize, 1.0), (2, 0.5)] {
        let r = sigma_local_group_fields(n, dx, lam)?;
        algebra = algebra.max(r.max_residual());
        for (a, c) in [(0, 2), (1, 0), (2, 1)] {
            algebra = algebra.max((r.central[a] - lam[c] / dx).abs());
        }
        let group = sigma_group(n, dx, lam)?;
        let mut rng = sampling::rng(21);
        for _ in 0..16 {
            let g = group.sample(&mut rng);
            let nr = sigma_theta_noether(n, dx, lam, &g)?;
            s_res = s_res.max(nr.s_residual).max(nr.theta_residual);
            l_res = l_res.max(nr.l_residual);
            printed_s = printed_s.max(nr.printed_s_residual);
        }
        let vars = 3 * n;
        let one = Poly::from_int(vars, 1);
        let square = (0..vars).fold(Poly::zero(vars), |acc, k| {
            acc.add(&Poly::var(vars, k).pow(2))
        });
        for test in [&one, &square] {
            let r = sigma_polarization_check(n, dx, lam, test, 16, 3, false)?;
            pol = pol.max(r.polarization).max(r.u1);
            let bad = sigma_polarization_check(n, dx, lam, test, 16, 3, true)?;
            control = control.min(bad.polarization);
        }
    }
    let ops = sigma_operator_suite(
        lam,
        &[Poly::from_int(3, 1), Poly::var(3, 0).mul(&Poly::var(3, 2))],
        8,
        4,
    )?;
    let passed = algebra < 1e-7 && s_res < 1e-9 && l_res < 1e-9 && pol < 1e-8 && control > 0.1;
    Ok(Outcome {
        passed,
        summary: format!(
            "N = 1, 2: algebra incl. lambda central term {algebra:.1e} (tol 1e-7); L = [Lambda, theta0] {l_res:.1e}; S = lambda - Lambda with Theta {s_res:.1e} (tol 1e-9; the printed Lambda - lambda differs by up to {printed_s:.2e}, sign recorded); polarization {pol:.1e} (tol 1e-8) for Phi = 1, s.s; control without theta phase {control:.2e}; measured [L,S] constant {:?}",
            ops.central
        ),
        metrics: metrics([
            ("algebra", num(algebra)),
            ("l_residual", num(l_res)),
            ("s_residual", num(s_res)),
            ("printed_s_residual", num(printed_s)),
            ("polarization", num(pol)),
            ("negative_control", num(control)),
            ("operator_jet_residual", num(ops.jet_residual)),
            ("operator_constant", Value::Array(ops.central.iter().copied().map(num).collect())),
        ]),
    })
}

pub const DETERMINISM_KEY: &str = "selftest-determinism";

pub const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        key: "galilei-structure",
        title: "Extended Galilei structure constants",
        budget: Some(1.0),
        check: galilei_structure,
    },
    Criterion {
        id: 2,
        key: "invariance-suite",
        title: "Invariance identities on both catalog groups",
        budget: Some(5.0),
        check: invariance,
    },
    Criterion {
        id: 3,
        key: "theta-closed-forms",
        title: "Quantization form closed forms",
        budget: None,
        check: theta_closed_forms,
    },
    Criterion {
        id: 4,
        key: "kernel-noether",
        title: "Characteristic kernel and Noether drift",
        budget: None,
        check: kernel_noether,
    },
    Criterion {
        id: 5,
        key: "lorentz-force",
        title: "Cyclotron period and uniform electric field",
        budget: Some(5.0),
        check: lorentz_force,
    },
    Criterion {
        id: 6,
        key: "jacobi-equivalence",
        title: "Equivalence principle from Jacobi residuals",
        budget: None,
        check: jacobi_equivalence,
    },
    Criterion {
        id: 7,
        key: "gem-convention",
        title: "Gravitoelectromagnetic sign convention",
        budget: None,
        check: gem_convention,
    },
    Criterion {
        id: 8,
        key: "so32-closure",
        title: "SO(3,2) bracket families",
        budget: None,
        check: so32_closure,
    },
    Criterion {
        id: 9,
        key: "ads-eigen",
        title: "AdS eigenfunction consistency",
        budget: Some(30.0),
        check: ads_eigen,
    },
    Criterion {
        id: 10,
        key: "galilei-quantum",
        title: "Galilei momentum-space solution and operators",
        budget: None,
        check: galilei_quantum,
    },
    Criterion {
        id: 11,
        key: "kg-lattice",
        title: "Klein-Gordon lattice group",
        budget: None,
        check: kg_lattice,
    },
    Criterion {
        id: 12,
        key: "kg-semi-invariance",
        title: "Klein-Gordon semi-invariance",
        budget: None,
        check: kg_semi,
    },
    Criterion {
        id: 13,
        key: "sigma-dynamics",
        title: "Sigma lattice conservation and convergence",
        budget: Some(30.0),
        check: sigma_dynamics,
    },
    Criterion {
        id: 14,
        key: "local-euclidean",
        title: "Local Euclidean group algebra, Noether fields, polarization",
        budget: None,
        check: local_euclidean,
    },
];

const FULL_BUDGET: f64 = 300.0;

fn run_one(c: &Criterion) -> CriterionResult {
    let start = Instant::now();
    let outcome = (c.check)().unwrap_or_else(|e| Outcome {
        passed: false,
        summary: format!("error: {e}"),
        metrics: metrics([("error", json!(e.to_string()))]),
    });
    let seconds = start.elapsed().as_secs_f64();
    let within = c.budget.is_none_or(|b| seconds < b);
    let mut summary = outcome.summary;
    if let Some(b) = c.budget {
        summary.push_str(&format!(
            "; budget {b} s{}",
            if within { "" } else { " exceeded" }
        ));
    }
    CriterionResult {
        id: c.id,
        key: c.key,
        title: c.title,
        passed: outcome.passed && within,
        summary,
        metrics: outcome.metrics,
        budget: c.budget,
        seconds,
    }
}

fn matches(filter: Option<&str>, id: u8, key: &str) -> bool {
    match filter {
        None => true,
        Some(f) => key.contains(f) || f.parse::<u8>().is_ok_and(|n| n == id),
    }
}

/// Deterministic rendering of a set of results, used by the determinism
/// criterion.
fn digest(results: &[CriterionResult]) -> String {
    to_json(&Value::Array(
        results.iter().map(CriterionResult::to_value).collect(),
    ))
}

/// Runs every criterion whose key contains `filter` (or whose number equals
/// it), calling `progress` after each one. The last criterion times the
/// whole suite and reruns it to compare the reports byte for byte.
pub fn run_selftest(
    filter: Option<&str>,
    mut progress: impl FnMut(&CriterionResult),
) -> SelftestReport {
    let start = Instant::now();
    let mut results = Vec::new();
    for c in CRITERIA.iter().filter(|c| matches(filter, c.id, c.key)) {
        let r = run_one(c);
        progress(&r);
        results.push(r);
    }
    if matches(filter, 15, DETERMINISM_KEY) {
        let ran_all = results.len() == CRITERIA.len();
        let (first, first_seconds) = if ran_all {
            (digest(&results), start.elapsed().as_secs_f64())
        } else {
            let t = Instant::now();
            let r: Vec<_> = CRITERIA.iter().map(run_one).collect();
            (digest(&r), t.elapsed().as_secs_f64())
        };
        let second: Vec<_> = CRITERIA.iter().map(run_one).collect();
        let identical = first == digest(&second);
        let all_passed = second.iter().all(|r| r.passed);
        let passed = identical && first_seconds < FULL_BUDGET;
        let r = CriterionResult {
            id: 15,
            key: DETERMINISM_KEY,
            title: "Full selftest runtime and reproducibility",
            passed,
            summary: format!(
                "criteria 1-14 ran in {first_seconds:.1} s (budget {FULL_BUDGET} s); rerun report byte-identical: {identical}; rerun all passed: {all_passed}"
            ),
            metrics: metrics([("identical", json!(identical))]),
            budget: Some(FULL_BUDGET),
            seconds: first_seconds,
        };
        progress(&r);
        results.push(r);
    }
    SelftestReport {
        filter: filter.map(str::to_string),
        results,
        seconds: start.elapsed().as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_selects_by_key_or_number() {
        let keys: Vec<_> = CRITERIA
            .iter()
            .filter(|c| matches(Some("jacobi"), c.id, c.key))
            .map(|c| c.key)
            .collect();
        assert_eq!(keys, ["jacobi-equivalence"]);
        assert!(matches(Some("13"), 13, "sigma-dynamics"));
        assert!(!matches(Some("nomatch"), 15, DETERMINISM_KEY));
    }

    #[test]
    fn empty_filter_result() {
        let r = run_selftest(Some("nomatch"), |_| {});
        assert!(r.results.is_empty());
        assert!(r.passed());
    }
}
