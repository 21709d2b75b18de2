use std::collections::BTreeMap;
use std::f64::consts::PI;

use gaq_core::group_model::{catalog, LieGroup};
use gaq_core::jetcalc::Jet2;
use gaq_core::quantum_gallery::*;
use num::complex::Complex64;
use num::{BigInt, BigRational, One, ToPrimitive};
use proptest::prelude::*;

fn galilei(m: f64) -> LieGroup {
    let p: BTreeMap<String, f64> = [("m".to_string(), m), ("hbar".to_string(), 1.0)].into();
    catalog("galilei_ext_1p1", &p).unwrap()
}

#[test]
fn gaussian_solves_momentum_schrodinger() {
    let g = galilei(1.0);
    let sec = standard_grid(gaussian_solution(1.0)).unwrap();
    let r = galilei_polarization_residual(&g, &sec).unwrap();
    assert_eq!(r.x_residual, 0.0);
    assert!(r.schrodinger < 1e-8, "{r:?}");
    assert_eq!(r.interior_points, 97 * 597);
}

#[test]
fn other_mass_needs_matching_solution() {
    let g = galilei(2.5);
    // A faster phase needs a finer time step.
    let grid = |f| GridSection::from_fn((0.0, 1e-3, 201), (-1.0, 0.01, 201), f).unwrap();
    let sec = grid(gaussian_solution(2.5));
    assert!(galilei_polarization_residual(&g, &sec).unwrap().schrodinger < 1e-8);
    let wrong = grid(gaussian_solution(1.0));
    assert!(
        galilei_polarization_residual(&g, &wrong)
            .unwrap()
            .schrodinger
            > 0.1
    );
}

#[test]
fn phaseless_gaussian_fails_polarization() {
    let g = galilei(1.0);
    let sec = standard_grid(|_, v| Complex64::new((-0.5 * v * v).exp(), 0.0)).unwrap();
    let r = galilei_polarization_residual(&g, &sec).unwrap();
    assert!(r.schrodinger > 0.1);
}

#[test]
fn zero_section_has_zero_residuals() {
    let g = galilei(1.0);
    let sec = standard_grid(|_, _| Complex64::new(0.0, 0.0)).unwrap();
    assert_eq!(
        galilei_polarization_residual(&g, &sec).unwrap().schrodinger,
        0.0
    );
    let ops = galilei_operator_suite(&g, &sec, 1.0).unwrap();
    assert_eq!((ops.commutator, ops.energy), (0.0, 0.0));
}

#[test]
fn operator_algebra_on_grid() {
    let g = galilei(1.0);
    let sec = standard_grid(gaussian_solution(1.0)).unwrap();
    let ops = galilei_operator_suite(&g, &sec, 1.0).unwrap();
    assert!(ops.commutator < 1e-6, "{ops:?}");
    assert!(ops.energy < 1e-8, "{ops:?}");
}

#[test]
fn degenerate_grid_rejected() {
    assert!(
        GridSection::from_fn((0.0, 0.0, 10), (0.0, 0.1, 10), |_, _| Complex64::new(
            1.0, 0.0
        ))
        .is_err()
    );
    assert!(
        GridSection::from_fn((0.0, 0.1, 3), (0.0, 0.1, 10), |_, _| Complex64::new(
            1.0, 0.0
        ))
        .is_err()
    );
}

#[test]
fn su2_metric_values() {
    let g0 = su2_metric(&[0.0; 3]).unwrap();
    assert_eq!(g0, nalgebra::Matrix3::identity());
    let g1 = su2_metric(&[1.0, 0.0, 0.0]).unwrap();
    assert!((g1[(0, 0)] - 4.0 / 3.0).abs() < 1e-15);
    assert_eq!(g1[(0, 1)], 0.0);
    assert!(su2_metric(&[2.0, 0.0, 0.0]).is_err());
    assert_eq!(su2_hamiltonian(&[0.3, 0.1, -0.2], &[0.0; 3]).unwrap(), 0.0);
}

#[test]
fn canonical_pair_and_hamiltonian_brackets() {
    let pt = PhasePoint::new([0.2, -0.4, 0.7], [0.5, 0.1, -0.3]).unwrap();
    let e1 = |v: &[Jet2]| Ok(v[0].clone());
    let p1 = |v: &[Jet2]| Ok(v[3].clone());
    assert_eq!(canonical_poisson_bracket(&e1, &p1, &pt).unwrap(), 1.0);
    for pt in sample_phase_points(32, 4, 0.0) {
        let (r_eps, r_pi) = hamiltonian_bracket_residuals(&pt, -0.25).unwrap();
        assert!(r_eps < 1e-9 && r_pi < 1e-9);
    }
}

#[test]
fn printed_pi_bracket_coefficient_does_not_hold() {
    let pt = PhasePoint::new([0.6, 0.2, -0.5], [0.7, -0.4, 0.3]).unwrap();
    let (_, r) = hamiltonian_bracket_residuals(&pt, 0.5).unwrap();
    assert!(r > 1e-2);
}

#[test]
fn generators_at_origin() {
    let g = ads_generators(&PhasePoint::new([0.0; 3], [1.0, 0.0, 0.0]).unwrap()).unwrap();
    assert!((g.energy - 2.0).abs() < 1e-15);
    assert_eq!(g.p, [2.0, 0.0, 0.0]);
    assert_eq!(g.k, [0.0; 3]);
    assert_eq!(g.j, [0.0; 3]);
    assert!(ads_generators(&PhasePoint::new([0.1; 3], [0.0; 3]).unwrap()).is_err());
}

#[test]
fn generator_identities() {
    for pt in sample_phase_points(16, 8, 0.1) {
        let g = ads_generators(&pt).unwrap();
        let h = su2_hamiltonian(&pt.eps, &pt.pi).unwrap();
        assert!((g.energy * g.energy - 8.0 * h).abs() < 1e-12);
        let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        assert!(dot(g.j, pt.eps).abs() < 1e-14 && dot(g.j, pt.pi).abs() < 1e-14);
    }
}

#[test]
fn so32_table_closes() {
    let full = so32_relations(-1.0);
    assert_eq!(full.len(), 3 * 3 + 9 * 6);
    assert!(bracket_table_check(&full, 64, 1).unwrap() < 1e-7);
    assert!(bracket_table_check(&so32_relations(1.0), 64, 1).unwrap() > 0.1);
    let ej3: Vec<Relation> = full.into_iter().filter(|r| r.f == 0 && r.g == 9).collect();
    assert_eq!(ej3.len(), 1);
    assert!(bracket_table_check(&ej3, 64, 2).unwrap() < 1e-9);
}

fn poly_family(c: [f64; 6]) -> impl Fn(&[Jet2]) -> Jet2 {
    move |v: &[Jet2]| {
        let mut acc = Jet2::constant(c[0]);
        acc += &(&v[0] * &v[3]).scale(c[1]);
        acc += &(&v[1] * &v[1]).scale(c[2]);
        acc += &(&v[4] * &v[2]).scale(c[3]);
        acc += &(&(&v[5] * &v[5]) * &v[0]).scale(c[4]);
        acc += &v[2].scale(c[5]);
        acc
    }
}

proptest! {
    #[test]
    fn bracket_is_antisymmetric_and_jacobi(
        cf in prop::array::uniform6(-2.0..2.0f64),
        cg in prop::array::uniform6(-2.0..2.0f64),
        ch in prop::array::uniform6(-2.0..2.0f64),
        x in prop::array::uniform6(-1.0..1.0f64),
    ) {
        let v = Jet2::vars(&x);
        let (f, g, h) = (poly_family(cf)(&v), poly_family(cg)(&v), poly_family(ch)(&v));
        prop_assert!((bracket_of_jets(&f, &g) + bracket_of_jets(&g, &f)).abs() < 1e-12);
        // {f, {g, h}} uses the gradient of {g, h}.
        let outer = |a: &Jet2, inner: [f64; 6]| -> f64 {
            (0..3).map(|i| a.grad(i) * inner[3 + i] - a.grad(3 + i) * inner[i]).sum()
        };
        let jac = outer(&f, bracket_gradient(&g, &h))
            + outer(&g, bracket_gradient(&h, &f))
            + outer(&h, bracket_gradient(&f, &g));
        prop_assert!(jac.abs() < 1e-8);
    }

    #[test]
    fn metric_determinant_closed_form(e in prop::array::uniform3(-1.1..1.1f64)) {
        let e2: f64 = e.iter().map(|x| x * x).sum();
        prop_assume!(e2 < 3.9);
        let g = su2_metric(&e).unwrap();
        let det = g.determinant();
        prop_assert!((det - 1.0 / (1.0 - e2 / 4.0)).abs() < 1e-10 * det);
        prop_assert!(det >= 1.0);
        let gi = su2_inverse_metric(&e).unwrap();
        prop_assert!((g * gi - nalgebra::Matrix3::identity()).abs().max() < 1e-12);
    }

    #[test]
    fn hyp2f1_matches_exact_sum(n in 0u32..=5, bn in -20i64..20, cn in 1i64..20, zn in -10i64..10) {
        let b = BigRational::new(BigInt::from(bn), BigInt::from(4));
        let c = BigRational::new(BigInt::from(cn), BigInt::from(2));
        let z = BigRational::new(BigInt::from(zn), BigInt::from(7));
        let mut term = BigRational::one();
        let mut sum = BigRational::one();
        for k in 0..n {
            let k = BigRational::from_integer(BigInt::from(k));
            let nn = BigRational::from_integer(BigInt::from(n));
            term = term * (&k - &nn) * (&b + &k) / ((&c + &k) * (&k + BigRational::one())) * &z;
            sum += &term;
        }
        let exact = sum.to_f64().unwrap();
        let got = hyp2f1_terminating(n, bn as f64 / 4.0, cn as f64 / 2.0, zn as f64 / 7.0).unwrap();
        prop_assert!((got - exact).abs() <= 1e-12 * exact.abs().max(1.0));
    }
}

#[test]
fn hyp2f1_small_cases() {
    assert_eq!(hyp2f1_terminating(0, 3.0, 2.0, 5.0).unwrap(), 1.0);
    assert_eq!(hyp2f1_terminating(3, 3.0, 2.0, 0.0).unwrap(), 1.0);
    let (b, c, z) = (0.7, 1.9, -0.35);
    assert!((hyp2f1_terminating(1, b, c, z).unwrap() - (1.0 - b / c * z)).abs() < 1e-15);
    assert!(hyp2f1_terminating(2, 1.0, -1.0, 0.5).is_err());
}

#[test]
fn spherical_harmonics_low_l() {
    let (th, ph) = (0.7, -1.1);
    let y00 = spherical_harmonic(0, 0, th, ph).unwrap();
    assert!((y00.re - 0.5 / PI.sqrt()).abs() < 1e-15);
    let y10 = spherical_harmonic(1, 0, th, ph).unwrap();
    assert!((y10.re - (3.0 / (4.0 * PI)).sqrt() * th.cos()).abs() < 1e-15);
    let y11 = spherical_harmonic(1, 1, th, ph).unwrap();
    let expect = Complex64::from_polar(-(3.0 / (8.0 * PI)).sqrt() * th.sin(), ph);
    assert!((y11 - expect).norm() < 1e-15);
    let y1m = spherical_harmonic(1, -1, th, ph).unwrap();
    assert!((y1m + y11.conj()).norm() < 1e-15);
    let y32 = spherical_harmonic(3, 2, th, ph).unwrap();
    let expect = Complex64::from_polar(
        0.25 * (105.0 / (2.0 * PI)).sqrt() * th.sin().powi(2) * th.cos(),
        2.0 * ph,
    );
    assert!((y32 - expect).norm() < 1e-14);
    assert!(spherical_harmonic(1, 2, th, ph).is_err());
}

#[test]
fn lambda_and_validation() {
    let p = AdsParams::default();
    assert_eq!(p.lambda().unwrap(), 3.0);
    assert_eq!(p.with_state(1, 2, 0).lambda().unwrap(), 7.0);
    assert!(AdsParams { xi: 1.0, ..p }.validate().is_err());
    assert!(p.with_state(0, 1, 2).validate().is_err());
    assert!(AdsParams { omega: 0.0, ..p }.validate().is_err());
}

#[test]
fn wavefunction_at_origin_and_rotation() {
    let p = AdsParams::default();
    for reading in [BoxReading::Printed, BoxReading::Consistent] {
        let v = ads_wavefunction(&p, reading, 0.0, [0.0; 3]).unwrap();
        assert!((v.norm() - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
    }
    // Rotation about z multiplies Y_l^m by e^{imα}.
    let q = p.with_state(1, 2, 1);
    let a = [0.2, 0.1, 0.3];
    let alpha: f64 = 0.9;
    let rot = [
        a[0] * alpha.cos() - a[1] * alpha.sin(),
        a[0] * alpha.sin() + a[1] * alpha.cos(),
        a[2],
    ];
    let v1 = ads_wavefunction(&q, BoxReading::Consistent, 0.15, a).unwrap();
    let v2 = ads_wavefunction(&q, BoxReading::Consistent, 0.15, rot).unwrap();
    assert!((v2 - v1 * Complex64::from_polar(1.0, alpha)).norm() < 1e-14);
}

#[test]
fn radial_factor_is_polynomial_in_q_r_squared() {
    // Divide out the prefactors and interpolate the series through n+1 radii.
    let p = AdsParams::default().with_state(2, 1, 0);
    let lambda = p.lambda().unwrap();
    let w = 0.64;
    let a0 = 0.1;
    let u_of = |r: f64| {
        let q2 = 1.0 + w / 4.0 * (r * r - a0 * a0);
        w * q2 * r * r
    };
    let series = |r: f64| {
        let (amp, _) = ads_radial(&p, BoxReading::Consistent, &a0, &r).unwrap();
        let u = u_of(r);
        let qr = (u / w).sqrt();
        amp / ((1.0 + u).powf(-lambda / 2.0) * qr)
    };
    let nodes = [0.2, 0.4, 0.6];
    let (us, fs): (Vec<f64>, Vec<f64>) = nodes.iter().map(|&r| (u_of(r), series(r))).unzip();
    let lagrange = |u: f64| -> f64 {
        (0..3)
            .map(|i| {
                let mut li = fs[i];
                for j in 0..3 {
                    if j != i {
                        li *= (u - us[j]) / (us[i] - us[j]);
                    }
                }
                li
            })
            .sum()
    };
    for r in [0.25, 0.5, 0.66] {
        assert!((lagrange(u_of(r)) - series(r)).abs() < 1e-12);
    }
}

#[test]
fn constant_state_is_annihilated() {
    let p = AdsParams::default();
    let one = |_: &Jet2, _: &Jet2| Ok((Jet2::constant(1.0), Jet2::constant(0.0)));
    let v = ads_box_apply(&p, BoxReading::Printed, one, 0, 0.2, 0.4, 1.0).unwrap();
    assert_eq!(v.ratio, Complex64::new(0.0, 0.0));
}

#[test]
fn consistent_reading_selects_one_sign() {
    let p = AdsParams::default();
    let states = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)];
    let rep = ads_eigen_consistency(&p, BoxReading::Consistent, &states, 32, 11).unwrap();
    assert_eq!(rep.selected_sign(EIGEN_SPREAD_TOL), Some(-1.0));
    for st in &rep.states {
        let s = st.stats(-1.0).unwrap();
        assert_eq!(s.samples, 32);
        assert!(s.relative_variance < 1e-6, "{st:?}");
        assert!(s.spread < 1e-9, "{st:?}");
        assert!(st.stats(1.0).unwrap().spread > 1e-3);
    }
}

#[test]
fn massive_eigenvalue() {
    let p = AdsParams {
        mass: 1.3,
        xi: 0.05,
        ..AdsParams::default()
    };
    let rep =
        ads_eigen_consistency(&p, BoxReading::Consistent, &[(0, 0, 0), (1, 1, 0)], 32, 3).unwrap();
    let expect = -1.3 * 1.3 + 12.0 * 0.05 * 0.64;
    for st in &rep.states {
        let s = st.stats(-1.0).unwrap();
        assert!(
            (s.mean.re - expect).abs() < 1e-9 && s.mean.im.abs() < 1e-9,
            "{st:?}"
        );
    }
}

#[test]
fn printed_reading_is_not_an_eigenfunction() {
    let p = AdsParams::default();
    let rep = ads_eigen_consistency(&p, BoxReading::Printed, &[(0, 0, 0)], 32, 11).unwrap();
    assert_eq!(rep.selected_sign(EIGEN_SPREAD_TOL), None);
}

#[test]
fn empty_state_list() {
    let rep =
        ads_eigen_consistency(&AdsParams::default(), BoxReading::Consistent, &[], 32, 1).unwrap();
    assert!(rep.states.is_empty());
    assert_eq!(rep.selected_sign(1e-9), None);
}

#[test]
fn state_list_parsing() {
    assert_eq!(
        parse_states("0,0,0; 1,0,0;0,1,0").unwrap(),
        vec![(0, 0, 0), (1, 0, 0), (0, 1, 0)]
    );
    assert!(parse_states("0,1").is_err());
    assert!(parse_states("0,1,2").is_err());
    assert!(parse_states("").unwrap().is_empty());
}
