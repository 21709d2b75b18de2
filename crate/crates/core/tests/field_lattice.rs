use std::f64::consts::PI;

use gaq_core::field_lattice::*;
use gaq_core::group_model::associativity_check;
use gaq_core::jetcalc::Jet2;
use gaq_core::lie_engine::Poly;
use gaq_core::sampling;
use proptest::prelude::*;

fn lattice(n: usize) -> KgLattice {
    KgLattice::new(n, 1.0, 1.0).unwrap()
}

fn random_state(n: usize, seed: u64) -> KgState {
    let mut rng = sampling::rng(seed);
    let phi = (0..n)
        .map(|_| sampling::uniform(&mut rng, -1.0, 1.0))
        .collect();
    let dot = (0..n)
        .map(|_| sampling::uniform(&mut rng, -1.0, 1.0))
        .collect();
    KgState::new(phi, dot).unwrap()
}

#[test]
fn mode_maps_are_unimodular() {
    for n in 4..=16 {
        let lat = lattice(n);
        for j in 0..n {
            for &b in &[0.0, 0.37, 2.0, -5.1] {
                let m = lat.mode_map(j, b);
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                assert!((det - 1.0).abs() < 1e-12, "n={n} j={j} b={b}");
            }
        }
    }
}

#[test]
fn time_translation_is_additive() {
    for n in 4..=16 {
        let lat = lattice(n);
        let s = random_state(n, n as u64);
        let two = kg_time_translate(&lat, &kg_time_translate(&lat, &s, 0.4).unwrap(), 0.9).unwrap();
        let one = kg_time_translate(&lat, &s, 1.3).unwrap();
        for i in 0..n {
            assert!((two.phi[i] - one.phi[i]).abs() < 1e-10);
            assert!((two.phidot[i] - one.phidot[i]).abs() < 1e-10);
        }
    }
}

#[test]
fn single_mode_oscillates_at_its_frequency() {
    let lat = lattice(8);
    let j = 3;
    let phi: Vec<f64> = (0..8)
        .map(|x| (2.0 * PI * (j * x) as f64 / 8.0).cos())
        .collect();
    let s = KgState::new(phi.clone(), vec![0.0; 8]).unwrap();
    let b = 0.7;
    let out = kg_time_translate(&lat, &s, b).unwrap();
    let w = lat.omega(j);
    for x in 0..8 {
        assert!((out.phi[x] - phi[x] * (w * b).cos()).abs() < 1e-12);
        assert!((out.phidot[x] + phi[x] * w * (w * b).sin()).abs() < 1e-12);
    }
}

#[test]
fn zero_state_stays_zero() {
    let lat = lattice(5);
    let out = kg_time_translate(&lat, &KgState::zeros(5), 3.0).unwrap();
    assert!(out.phi.iter().chain(&out.phidot).all(|x| x.abs() < 1e-15));
}

#[test]
fn lattice_rejects_bad_inputs() {
    assert!(KgLattice::new(0, 1.0, 1.0).is_err());
    assert!(KgLattice::new(4, 0.0, 1.0).is_err());
    assert!(KgLattice::new(4, 1.0, 0.0).is_err());
    assert!(kg_time_translate(&lattice(4), &KgState::zeros(3), 1.0).is_err());
    assert!(KgState::new(vec![f64::NAN], vec![0.0]).is_err());
}

#[test]
fn charge_keeps_modulus_and_advances_phase() {
    for n in 4..=16 {
        let lat = lattice(n);
        let s = random_state(n, 100 + n as u64);
        let b = 1.7;
        let moved = kg_time_translate(&lat, &s, b).unwrap();
        for j in 0..n {
            let (a0, a1) = (
                kg_noether_charge(&lat, &s, j),
                kg_noether_charge(&lat, &moved, j),
            );
            assert!((a0.norm() - a1.norm()).abs() < 1e-10);
            if a0.norm() > 1e-6 {
                let advance = (a0 / a1).arg();
                let expect = (lat.c * lat.omega(j) * b + PI).rem_euclid(2.0 * PI) - PI;
                let diff = (advance - expect + PI).rem_euclid(2.0 * PI) - PI;
                assert!(diff.abs() < 1e-9, "n={n} j={j}: {advance} vs {expect}");
            }
        }
    }
}

#[test]
fn kg_group_is_associative() {
    let g = kg_group(lattice(4)).unwrap();
    assert!(associativity_check(&g, 16, 3).unwrap() < 1e-9);
}

#[test]
fn lattice_algebra_families() {
    for n in [4, 7] {
        let r = kg_group_fields(lattice(n)).unwrap();
        assert!(r.max_family_residual() < 1e-9, "n={n}: {r:?}");
        assert!(r.nested < 1e-9);
        assert!((r.central_value - 1.0).abs() < 1e-9);
    }
}

#[test]
fn central_term_scales_with_inverse_spacing() {
    let lat = KgLattice::new(4, 0.5, 1.3).unwrap();
    let r = kg_group_fields(lat).unwrap();
    assert!(r.max_family_residual() < 1e-9);
    assert!((r.central_value - 2.0).abs() < 1e-9);
}

#[test]
fn semi_invariance_on_and_off_shell() {
    let on = kg_semi_invariance_residual(1.2, 64, 5, 0.0, Prolongation::Derivative).unwrap();
    assert!(on < 1e-10, "{on}");
    let off = kg_semi_invariance_residual(1.2, 64, 5, 0.3, Prolongation::Derivative).unwrap();
    assert!(off > 1e-2, "{off}");
}

#[test]
fn lightlike_wave_is_semi_invariant_without_mass() {
    let r = semi_invariance_at(
        0.0,
        &[0.1, 0.2, -0.3, 0.4],
        0.8,
        &[0.3, -0.2, 0.5, 0.1],
        [1.0, 1.0, 0.0, 0.0],
        Prolongation::Derivative,
    )
    .unwrap();
    assert!(r < 1e-12);
}

#[test]
fn printed_prolongation_breaks_semi_invariance() {
    let r = kg_semi_invariance_residual(1.2, 64, 5, 0.0, Prolongation::Printed).unwrap();
    assert!(r > 1e-2);
}

fn sigma_default() -> (SigmaLattice, SigmaState) {
    let lat = SigmaLattice::new(8, 0.4, [0.0, 0.0, 0.7]).unwrap();
    let st = SigmaState::random(&lat, 1, 1.0).unwrap();
    (lat, st)
}

#[test]
fn sigma_brackets_match_closed_forms() {
    let lat = SigmaLattice::new(3, 0.5, [0.2, -0.1, 0.6]).unwrap();
    let st = SigmaState::random(&lat, 2, 1.0).unwrap();
    let n = lat.sites;
    let coord = |k: usize| move |z: &[Jet2]| Ok(z[k].clone());
    let (s, l) = (
        |i: usize, a: usize| 3 * i + a,
        |i: usize, a: usize| 3 * (n + i) + a,
    );
    let ll = sigma_bracket(&coord(l(1, 0)), &coord(l(1, 1)), &st, &lat).unwrap();
    assert!((ll + st.l[1][2] / lat.spacing).abs() < 1e-12);
    let ls = sigma_bracket(&coord(l(1, 0)), &coord(s(1, 1)), &st, &lat).unwrap();
    assert!((ls - (-st.s[1][2] + lat.lambda[2]) / lat.spacing).abs() < 1e-12);
    let cross = sigma_bracket(&coord(l(0, 0)), &coord(s(2, 1)), &st, &lat).unwrap();
    assert_eq!(cross, 0.0);
    let ss = sigma_bracket(&coord(s(0, 0)), &coord(s(0, 1)), &st, &lat).unwrap();
    assert_eq!(ss, 0.0);
}

#[test]
fn sigma_poisson_tensor_satisfies_jacobi() {
    let lat = SigmaLattice::new(2, 0.7, [0.3, 0.0, 0.5]).unwrap();
    let st = SigmaState::random(&lat, 9, 1.0).unwrap();
    assert!(sigma_jacobi_residual(&lat, &st) < 1e-12);
}

#[test]
fn casimirs_commute_with_everything() {
    let lat = SigmaLattice::new(2, 0.5, [0.0, 0.4, 0.4]).unwrap();
    let st = SigmaState::random(&lat, 4, 1.0).unwrap();
    let lam = lat.lambda;
    let casimir = move |z: &[Jet2]| {
        let mut acc = Jet2::constant(0.0);
        for a in 0..3 {
            let d = z[a].clone() - lam[a];
            acc += &(&d * &d);
        }
        Ok(acc)
    };
    for k in 0..12 {
        let f = move |z: &[Jet2]| Ok(z[k].clone());
        assert!(sigma_bracket(&casimir, &f, &st, &lat).unwrap().abs() < 1e-12);
    }
}

#[test]
fn equations_of_motion_match_bracket() {
    let (lat, st) = sigma_default();
    assert!(sigma_rhs_crosscheck(&lat, &st) < 1e-10);
}

#[test]
fn sigma_run_conserves_invariants() {
    let (lat, st) = sigma_default();
    let run = sigma_evolve(&st, &lat, 1.0, 1e-3).unwrap();
    assert!(run.trajectory.is_complete());
    assert!(run.conservation.max() < 1e-8, "{:?}", run.conservation);
    assert!(run.conservation.total_l < 1e-12);
}

#[test]
fn drift_is_fourth_order() {
    let (lat, st) = sigma_default();
    let h = sigma_step_halving(&st, &lat, 1.0, 1e-3).unwrap();
    assert!(
        (12.0..=20.0).contains(&h.hamiltonian_ratio),
        "{}",
        h.hamiltonian_ratio
    );
    assert!(
        (12.0..=20.0).contains(&h.casimir_ratio),
        "{}",
        h.casimir_ratio
    );
}

#[test]
fn aligned_constant_field_is_stationary() {
    let lat = SigmaLattice::new(4, 0.5, [0.0, 0.0, 1.0]).unwrap();
    let st = SigmaState::new(&lat, vec![[0.0, 0.0, 0.3]; 4], vec![[0.0; 3]; 4]).unwrap();
    let rhs = sigma_rhs(&lat, &st.coords());
    assert!(rhs.iter().all(|x| x.abs() < 1e-15));
}

#[test]
fn sigma_rejects_bad_inputs() {
    assert!(SigmaLattice::new(4, 0.5, [0.0; 3]).is_err());
    assert!(SigmaLattice::new(0, 0.5, [1.0, 0.0, 0.0]).is_err());
    let lat = SigmaLattice::new(2, 0.5, [1.0, 0.0, 0.0]).unwrap();
    assert!(SigmaState::new(&lat, vec![[0.0; 3]], vec![[0.0; 3]; 2]).is_err());
    assert!(sigma_evolve(&SigmaState::random(&lat, 1, 1.0).unwrap(), &lat, 1.0, 0.0).is_err());
}

#[test]
fn local_group_is_associative() {
    let g = sigma_group(2, 0.5, [0.2, -0.3, 0.6]).unwrap();
    assert!(associativity_check(&g, 16, 8).unwrap() < 1e-9);
}

#[test]
fn local_algebra_with_central_term() {
    for (n, dx) in [(1, 1.0), (2, 0.5)] {
        let lam = [0.3, -0.2, 0.9];
        let r = sigma_local_group_fields(n, dx, lam).unwrap();
        assert!(r.max_residual() < 1e-7, "n={n}: {r:?}");
        let expect = [lam[2] / dx, lam[0] / dx, lam[1] / dx];
        for a in 0..3 {
            assert!((r.central[a] - expect[a]).abs() < 1e-7);
        }
    }
}

#[test]
fn noether_contractions_have_closed_forms() {
    let lam = [0.1, 0.5, -0.4];
    let group = sigma_group(2, 0.5, lam).unwrap();
    let mut rng = sampling::rng(21);
    for _ in 0..8 {
        let g = group.sample(&mut rng);
        let r = sigma_theta_noether(2, 0.5, lam, &g).unwrap();
        assert!(r.l_residual < 1e-9, "{r:?}");
        assert!(r.s_residual < 1e-9);
        assert!(r.theta_residual < 1e-9);
        assert!(r.orbit_residual < 1e-9);
        assert!(r.printed_s_residual > 1e-3);
    }
}

#[test]
fn polarized_wavefunctions() {
    let lam = [0.0, 0.6, 0.8];
    for n in [1, 2] {
        let vars = 3 * n;
        let one = Poly::from_int(vars, 1);
        let square = (0..vars).fold(Poly::zero(vars), |acc, k| {
            acc.add(&Poly::var(vars, k).pow(2))
        });
        for test in [&one, &square] {
            let r = sigma_polarization_check(n, 0.5, lam, test, 8, 3, false).unwrap();
            assert!(r.polarization < 1e-8 && r.u1 < 1e-8, "n={n}: {r:?}");
        }
        let bad = sigma_polarization_check(n, 0.5, lam, &one, 8, 3, true).unwrap();
        assert!(bad.polarization > 0.05, "{bad:?}");
    }
}

#[test]
fn polarization_rejects_wrong_arity() {
    assert!(
        sigma_polarization_check(1, 1.0, [0.0, 0.0, 1.0], &Poly::from_int(2, 1), 4, 1, false)
            .is_err()
    );
}

#[test]
fn operator_realization() {
    let lam = [0.25, -0.5, 0.75];
    let tests = [
        Poly::from_int(3, 1),
        Poly::var(3, 0).mul(&Poly::var(3, 1)),
        Poly::var(3, 2).pow(3).add(&Poly::var(3, 0)),
    ];
    let r = sigma_operator_suite(lam, &tests, 16, 2).unwrap();
    assert!(r.jet_residual < 1e-9);
    assert!(r.exact_identity && r.s_commute && r.invariant_annihilated && r.degree_preserved);
    // [L̂_a, Ŝ_b]1 = −η_abc s_c, read at s = λ.
    let expect = [-lam[2], -lam[0], -lam[1]];
    for a in 0..3 {
        assert!((r.central[a] - expect[a]).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mode_map_composes(j in 0usize..6, b1 in -3.0f64..3.0, b2 in -3.0f64..3.0) {
        let lat = KgLattice::new(6, 0.7, 0.9).unwrap();
        let (a, b, ab) = (lat.mode_map(j, b1), lat.mode_map(j, b2), lat.mode_map(j, b1 + b2));
        for r in 0..2 {
            for c in 0..2 {
                let prod = a[r][0] * b[0][c] + a[r][1] * b[1][c];
                prop_assert!((prod - ab[r][c]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rotation_is_orthogonal(e in prop::array::uniform3(-1.1f64..1.1)) {
        let r = rotation(&e).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
                let unit = f64::from(u8::from(i == j));
                prop_assert!((dot - unit).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sigma_bracket_is_antisymmetric(seed in 0u64..1000, a in 0usize..12, b in 0usize..12) {
        let lat = SigmaLattice::new(2, 0.6, [0.2, 0.3, -0.5]).unwrap();
        let st = SigmaState::random(&lat, seed, 1.0).unwrap();
        let f = move |z: &[Jet2]| Ok(&z[a] * &z[b]);
        let g = move |z: &[Jet2]| Ok(z[(a + 5) % 12].clone());
        let fg = sigma_bracket(&f, &g, &st, &lat).unwrap();
        let gf = sigma_bracket(&g, &f, &st, &lat).unwrap();
        prop_assert!((fg + gf).abs() < 1e-12);
    }
}
