use std::collections::BTreeMap;
use std::f64::consts::PI;

use gaq_core::dynamics::*;
use gaq_core::group_model::{catalog, LieGroup};
use gaq_core::jetcalc::{rk4_integrate, OdeTrajectory};

fn galilei(m: f64) -> LieGroup {
    let p: BTreeMap<String, f64> = [("m".to_string(), m), ("hbar".to_string(), 1.0)].into();
    catalog("galilei_ext_1p1", &p).unwrap()
}

#[test]
fn galilei_flow_is_free_motion() {
    let g = galilei(1.0);
    let (x0, v0) = (0.3, -0.8);
    let tr = flow_characteristic(&g, &[0.0, x0, v0, 0.0], 2.0, 1e-2).unwrap();
    assert!(tr.is_complete());
    for (t, s) in tr.times.iter().zip(&tr.states) {
        assert!((s[0] - t).abs() < 1e-9);
        assert!((s[1] - (x0 + v0 * t)).abs() < 1e-9);
        assert!((s[2] - v0).abs() < 1e-9);
        assert!((s[3] - 0.5 * v0 * v0 * t).abs() < 1e-9);
    }
}

#[test]
fn galilei_noether_drift_over_ten_units() {
    let g = galilei(1.0);
    let tr = flow_characteristic(&g, &[0.0, 0.5, 1.2, 0.1], 10.0, 1e-2).unwrap();
    let rep = conservation_report(&g, &tr).unwrap();
    assert!(rep.max_drift() < 1e-8, "{rep:?}");
    assert_eq!(rep.t_final, 10.0);
}

#[test]
fn non_characteristic_direction_breaks_conservation() {
    let g = galilei(1.0);
    // Time evolution with a spurious push along v.
    let tr = rk4_integrate(
        |_, y| Ok(vec![1.0, y[2], 0.5, 0.5 * y[2] * y[2]]),
        &[0.0, 0.5, 1.2, 0.1],
        1.0,
        1e-2,
    )
    .unwrap();
    let rep = conservation_report(&g, &tr).unwrap();
    assert!(rep.max_drift() > 0.1);
}

#[test]
fn empty_trajectory_has_zero_drift() {
    let g = galilei(1.0);
    let tr = OdeTrajectory {
        times: vec![0.0],
        states: vec![vec![0.1, 0.2, 0.3, 0.4]],
        step: 1e-3,
        error: None,
    };
    assert_eq!(conservation_report(&g, &tr).unwrap().max_drift(), 0.0);
}

#[test]
fn flow_refuses_degenerate_kernel() {
    let p: BTreeMap<String, f64> = [("m", 1.0), ("q", 1.0), ("hbar", 1.0)]
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
    let em = catalog("galilei_em_3p1", &p).unwrap();
    assert!(flow_characteristic(&em, &em.identity(), 1.0, 1e-2).is_err());
}

#[test]
fn flow_phase_is_exact_at_coarse_steps() {
    let g = galilei(1.0);
    // The flow is polynomial in t, well within what RK4 integrates exactly.
    let a = flow_characteristic(&g, &[0.0, 0.1, 0.7, 0.0], 1.0, 0.1).unwrap();
    let b = flow_characteristic(&g, &[0.0, 0.1, 0.7, 0.0], 1.0, 0.05).unwrap();
    let (ea, eb) = (a.last()[3] - 0.245, b.last()[3] - 0.245);
    assert!(ea.abs() < 1e-12 && eb.abs() < 1e-12);
}

#[test]
fn cyclotron_period_and_radius() {
    // Uniform B = 2 along z.
    let cfg = FieldConfig::parse("A1 = -y\nA2 = x").unwrap();
    let (q, m, b) = (1.5, 0.75, 2.0);
    let omega = q * b / m;
    let period = 2.0 * PI / omega;
    let speed = 0.6;
    let radius = speed * m / (q * b);
    let f = em_equations_of_motion(&cfg, q, m).unwrap();
    // Start on the orbit centred at the origin.
    let y0 = [radius, 0.0, 0.0, 0.0, -speed, 0.0];
    let tr = rk4_integrate(&f, &y0, 1.2 * period, 1e-3).unwrap();
    let measured = gyration_period(&tr).unwrap();
    assert!(
        (measured - period).abs() / period < 1e-5,
        "{measured} vs {period}"
    );
    for s in &tr.states {
        let r = (s[0] * s[0] + s[1] * s[1]).sqrt();
        assert!((r - radius).abs() < 1e-6);
    }
}

#[test]
fn uniform_electric_field() {
    let cfg = FieldConfig::parse("A0 = -0.8*x").unwrap();
    let (q, m) = (2.0, 0.5);
    let f = em_equations_of_motion(&cfg, q, m).unwrap();
    let tr = rk4_integrate(&f, &[0.0, 0.0, 0.0, 0.1, 0.2, 0.0], 1.0, 1e-3).unwrap();
    for (t, s) in tr.times.iter().zip(&tr.states) {
        assert!((s[3] - (0.1 + q * 0.8 / m * t)).abs() < 1e-9);
        assert!((s[4] - 0.2).abs() < 1e-12);
    }
}

#[test]
fn em_energy_conserved_in_static_field() {
    let cfg = FieldConfig::parse("A0 = 0.3*x^2 + 0.1*y*z\nA3 = 0.4*x").unwrap();
    let (q, m) = (1.0, 2.0);
    let f = em_equations_of_motion(&cfg, q, m).unwrap();
    let tr = rk4_integrate(&f, &[0.1, 0.2, -0.3, 0.3, -0.1, 0.2], 1.0, 1e-3).unwrap();
    let energy = |s: &[f64]| {
        0.5 * m * (s[3] * s[3] + s[4] * s[4] + s[5] * s[5]) + q * cfg.scalar(0.0, &s[0..3]).unwrap()
    };
    let e0 = energy(&tr.states[0]);
    for s in &tr.states {
        assert!((energy(s) - e0).abs() < 1e-6);
    }
}

#[test]
fn zero_fields_give_free_motion() {
    let em = FieldConfig::parse("A0 = 0").unwrap();
    let f = em_equations_of_motion(&em, 1.0, 1.0).unwrap();
    assert_eq!(
        f(0.3, &[1.0, 2.0, 3.0, 0.1, 0.2, 0.3]).unwrap(),
        vec![0.1, 0.2, 0.3, 0.0, 0.0, 0.0]
    );
    let gr = FieldConfig::parse("h00 = 0").unwrap();
    let f = gravity_equations_of_motion(&gr, 1.0).unwrap();
    assert_eq!(
        f(0.3, &[1.0, 2.0, 3.0, 0.1, 0.2, 0.3]).unwrap(),
        vec![0.1, 0.2, 0.3, 0.0, 0.0, 0.0]
    );
}

#[test]
fn uniform_gravity_gradient() {
    let cfg = FieldConfig::parse("h00 = 0.5*x - 0.2*z").unwrap();
    let f = gravity_equations_of_motion(&cfg, 3.0).unwrap();
    let tr = rk4_integrate(&f, &[0.0; 6], 1.0, 1e-3).unwrap();
    for (t, s) in tr.times.iter().zip(&tr.states) {
        assert!((s[0] - 0.25 * t * t).abs() < 1e-9);
        assert!((s[2] + 0.1 * t * t).abs() < 1e-9);
    }
}

#[test]
fn gravity_is_mass_independent() {
    let cfg =
        FieldConfig::parse("h00 = 0.3*x*y\nh1 = 0.2*y + 0.1*t*z\nh2 = -0.3*x^2\nh3 = 0.1*x*y")
            .unwrap();
    let y0 = [0.1, -0.2, 0.3, 0.4, 0.0, -0.1];
    let a = rk4_integrate(
        gravity_equations_of_motion(&cfg, 1.0).unwrap(),
        &y0,
        1.0,
        1e-3,
    )
    .unwrap();
    let b = rk4_integrate(
        gravity_equations_of_motion(&cfg, 7.0).unwrap(),
        &y0,
        1.0,
        1e-3,
    )
    .unwrap();
    assert_eq!(a.states, b.states);
}

#[test]
fn gem_convention_is_unique_and_seed_stable() {
    let cfg = FieldConfig::parse(
        "h00 = 0.3*x*y - 0.2*t*z\nh1 = 0.2*y + 0.1*t*z^2\nh2 = -0.3*x^2 + 0.5*y*z\nh3 = 0.1*x*y + 0.4*t",
    )
    .unwrap();
    let r1 = gem_equivalence_check(&cfg, 64, 1).unwrap();
    assert!(r1.unique(), "{r1:?}");
    assert_eq!(
        r1.best,
        GemConvention {
            q_sign: -1,
            a0_sign: 1
        }
    );
    assert!(r1.residual_of(GemConvention::PRINTED) > 1e-3);
    let r2 = gem_equivalence_check(&cfg, 64, 99).unwrap();
    assert_eq!(r1.best, r2.best);
}

#[test]
fn gem_without_vector_part() {
    let cfg = FieldConfig::parse("h00 = 0.3*x*y + z^2").unwrap();
    let r = gem_equivalence_check(&cfg, 16, 5).unwrap();
    assert_eq!(
        r.residual_of(GemConvention {
            q_sign: -1,
            a0_sign: 1
        }),
        0.0
    );
    assert_eq!(
        r.residual_of(GemConvention {
            q_sign: -1,
            a0_sign: -1
        }),
        0.0
    );
}

#[test]
fn field_config_errors() {
    assert!(FieldConfig::parse("A0 = x\nh1 = y").is_err());
    assert!(FieldConfig::parse("B = x").is_err());
    assert!(FieldConfig::parse("A0 = x +").is_err());
    assert!(FieldConfig::parse("").is_err());
    assert!(FieldConfig::parse("A0 = x\nA0 = y").is_err());
}
