use std::collections::BTreeMap;

use gaq_core::group_model::{catalog, LieGroup};
use gaq_core::grouplang::parse_group_file;
use gaq_core::lie_engine::*;
use gaq_core::sampling;

fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn galilei(m: f64) -> LieGroup {
    catalog("galilei_ext_1p1", &params(&[("m", m), ("hbar", 1.0)])).unwrap()
}

fn em() -> LieGroup {
    catalog(
        "galilei_em_3p1",
        &params(&[("m", 1.0), ("q", 1.0), ("hbar", 1.0)]),
    )
    .unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() < tol, "{a:?} vs {b:?}");
    }
}

#[test]
fn galilei_left_and_right_fields() {
    let g = galilei(1.7);
    let m = 1.7;
    let p = [0.3, -0.4, 0.8, 0.1];
    let (t, x, v) = (p[0], p[1], p[2]);
    let lv = left_field(&g, "v").unwrap().eval(&p).unwrap();
    close(&lv, &[0.0, 0.0, 1.0, m * x], 1e-12);
    let lt = left_field(&g, "t").unwrap().eval(&p).unwrap();
    close(&lt, &[1.0, v, 0.0, 0.5 * m * v * v], 1e-12);
    let rv = right_field(&g, "v").unwrap().eval(&p).unwrap();
    close(&rv, &[0.0, t, 1.0, m * t * v], 1e-12);
    let rx = right_field(&g, "x").unwrap().eval(&p).unwrap();
    close(&rx, &[0.0, 1.0, 0.0, m * v], 1e-12);
}

#[test]
fn fields_agree_at_identity() {
    for grp in [galilei(1.0), em()] {
        let e = grp.identity();
        for l in grp.labels().to_vec() {
            let a = left_field(&grp, &l).unwrap().eval(&e).unwrap();
            let b = right_field(&grp, &l).unwrap().eval(&e).unwrap();
            close(&a, &b, 1e-14);
        }
    }
}

#[test]
fn right_commutator_of_x_and_v_is_minus_m_phase() {
    let g = galilei(2.0);
    let p = [0.5, 0.2, -0.7, 0.3];
    let c = commutator_field(
        &right_field(&g, "x").unwrap(),
        &right_field(&g, "v").unwrap(),
    );
    let phi = right_field(&g, "phi").unwrap().eval(&p).unwrap();
    let expect: Vec<f64> = phi.iter().map(|x| -2.0 * x).collect();
    close(&c.eval(&p).unwrap(), &expect, 1e-12);
    let self_br = commutator_field(
        &right_field(&g, "v").unwrap(),
        &right_field(&g, "v").unwrap(),
    );
    close(&self_br.eval(&p).unwrap(), &[0.0; 4], 1e-14);
}

#[test]
fn galilei_structure_constants() {
    let t = structure_constants(&galilei(1.0)).unwrap();
    assert_eq!(t.entry("x", "v", "phi").unwrap(), -1.0);
    assert_eq!(t.entry("t", "v", "x").unwrap(), 1.0);
    let nz = t.nonzero(1e-14);
    assert_eq!(nz.len(), 2);
    assert!(t.max_jacobi_residual() < 1e-14);
    let left = table_at_identity(&galilei(1.0), FieldKind::Left).unwrap();
    assert!(left.max_diff(&t.negated()) < 1e-12);
}

#[test]
fn em_structure_constants_match_left_table() {
    let grp = em();
    let left = table_at_identity(&grp, FieldKind::Left).unwrap();
    assert!((left.entry("t", "At", "phi").unwrap() + 1.0).abs() < 1e-12);
    for (i, xi) in ["x1", "x2", "x3"].iter().enumerate() {
        for (j, aj) in ["A1", "A2", "A3"].iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((left.entry(xi, aj, "phi").unwrap() - want).abs() < 1e-12);
        }
    }
    let right = structure_constants(&grp).unwrap();
    assert!(right.max_diff(&left.negated()) < 1e-12);
    assert!(right.max_jacobi_residual() < 1e-12);
}

#[test]
fn abelian_law_has_zero_table() {
    let def = parse_group_file(
        "group abel\ncoords a b phi\ncentral phi\nidentity 0 0 0\nlaw:\na'' = a' + a\nb'' = b' + b\nphi'' = phi' + phi\n",
    )
    .unwrap();
    let g = LieGroup::from_definition(def, &BTreeMap::new()).unwrap();
    let t = structure_constants(&g).unwrap();
    assert_eq!(t.max_abs(), 0.0);
    let c = classify_parameters(&t, "phi").unwrap();
    assert!(c.basic.is_empty());
    assert_eq!(c.non_basic.len(), 2);
}

#[test]
fn galilei_theta_closed_form() {
    let m = 1.3;
    let g = galilei(m);
    let mut rng = sampling::rng(7);
    for _ in 0..16 {
        let p = g.sample(&mut rng);
        let th = theta(&g, &p).unwrap();
        close(&th, &[-0.5 * m * p[2] * p[2], 0.0, -m * p[1], 1.0], 1e-12);
        let (th2, _) = theta_and_dtheta(&g, &p).unwrap();
        close(&th, &th2, 1e-12);
    }
    close(
        &theta(&g, &g.identity()).unwrap(),
        &[0.0, 0.0, 0.0, 1.0],
        1e-15,
    );
}

#[test]
fn em_theta_closed_form() {
    let g = em();
    let mut rng = sampling::rng(11);
    for _ in 0..16 {
        let p = g.sample(&mut rng);
        let th = theta(&g, &p).unwrap();
        let (x, v, a_t) = (&p[1..4], &p[4..7], p[10]);
        let v2: f64 = v.iter().map(|u| u * u).sum();
        let mut want = vec![0.0; 12];
        want[0] = -(0.5 * v2 + a_t);
        for i in 0..3 {
            want[4 + i] = -x[i];
            want[7 + i] = -x[i];
        }
        want[11] = 1.0;
        close(&th, &want, 1e-9);
    }
}

#[test]
fn galilei_kernel_and_noether() {
    let g = galilei(1.0);
    let ns = characteristic_kernel(&g, &[0.2, -0.1, 3.0, 0.4], 1e-8).unwrap();
    assert_eq!(ns.dim(), 1);
    let k = &ns.basis[0];
    let s = 1.0 / k[0];
    close(
        &k.iter().map(|x| x * s).collect::<Vec<_>>(),
        &[1.0, 3.0, 0.0, 4.5],
        1e-9,
    );
    let at_e = characteristic_kernel(&g, &g.identity(), 1e-8).unwrap();
    assert_eq!(at_e.dim(), 1);
    assert!((at_e.basis[0][0].abs() - 1.0).abs() < 1e-12);

    let p = [0.7, 0.4, -0.9, 0.2];
    let (t, x, v) = (p[0], p[1], p[2]);
    assert!((noether_invariant(&g, "x", &p).unwrap() - v).abs() < 1e-12);
    assert!((noether_invariant(&g, "v", &p).unwrap() - (v * t - x)).abs() < 1e-12);
    assert!((noether_invariant(&g, "t", &p).unwrap() + 0.5 * v * v).abs() < 1e-12);
    let f = noether_invariants(&g, &g.identity()).unwrap();
    close(&f, &[0.0, 0.0, 0.0, 1.0], 1e-15);
}

#[test]
fn kernel_dimension_is_stable_over_samples() {
    let g = galilei(1.0);
    let mut rng = sampling::rng(3);
    for _ in 0..16 {
        let p = g.sample(&mut rng);
        assert_eq!(characteristic_kernel(&g, &p, 1e-8).unwrap().dim(), 1);
    }
}

#[test]
fn em_kernel_with_potentials_frozen() {
    let g = em();
    let p = [
        0.1, 0.3, -0.2, 0.5, 0.4, -0.6, 0.2, 0.3, 0.1, -0.4, 0.25, 0.0,
    ];
    let full = characteristic_kernel(&g, &p, 1e-8).unwrap();
    assert_eq!(full.dim(), 3);
    let frozen: Vec<usize> = (7..11).collect();
    let ns = characteristic_kernel_frozen(&g, &p, 1e-8, &frozen).unwrap();
    assert_eq!(ns.dim(), 1);
    let k = &ns.basis[0];
    let s = 1.0 / k[0];
    let v2 = 0.4f64 * 0.4 + 0.36 + 0.04;
    let mut want = vec![0.0; 12];
    want[0] = 1.0;
    want[1..4].copy_from_slice(&p[4..7]);
    want[11] = 0.5 * v2 + p[10];
    close(&k.iter().map(|x| x * s).collect::<Vec<_>>(), &want, 1e-9);
}

#[test]
fn classification() {
    let t = structure_constants(&galilei(1.0)).unwrap();
    let c = classify_parameters(&t, "phi").unwrap();
    assert_eq!(c.basic.iter().cloned().collect::<Vec<_>>(), vec!["v", "x"]);
    assert_eq!(c.non_basic.iter().cloned().collect::<Vec<_>>(), vec!["t"]);
    for (a, b) in &c.pairings {
        assert!(c.pairings.contains(&(b.clone(), a.clone())));
    }
    let e = structure_constants(&em()).unwrap();
    let c = classify_parameters(&e, "phi").unwrap();
    assert!(c.pairings.contains(&("t".into(), "At".into())));
    assert!(c.pairings.contains(&("x2".into(), "A2".into())));
    assert!(!c.pairings.contains(&("x1".into(), "A2".into())));
}

#[test]
fn invariance_suite_on_catalog_groups() {
    let r = invariance_suite(&galilei(1.0), 32, 1).unwrap();
    assert!(r.max() < 1e-8, "{r:?}");
    assert!(r.skipped.is_empty());
    let r = invariance_suite(&em(), 16, 2).unwrap();
    assert!(r.max() < 1e-8, "{r:?}");
}

#[test]
fn broken_cocycle_fails_invariance() {
    // The v'*v term carries the wrong weight; still a law at the identity.
    let def = parse_group_file(
        "group broken\nparams m=1\ncoords t x v phi\ncentral phi\nidentity 0 0 0 0\nlaw:\n\
         t'' = t' + t\nx'' = x' + x + v'*t\nv'' = v' + v\n\
         phi'' = phi' + phi + m*(x'*v + t*(1.5*v'*v + 0.5*v'^2))\n",
    )
    .unwrap();
    let g = LieGroup::from_definition(def, &BTreeMap::new()).unwrap();
    let r = invariance_suite(&g, 8, 4).unwrap();
    assert!(r.lie_theta > 1e-3, "{r:?}");
    assert!(structure_constants(&g).is_err());
}

#[test]
fn jacobi_negative_control() {
    let mut t = StructureTable::zeros(vec!["a".into(), "b".into(), "c".into()]);
    t.set(0, 1, 1, 1.0);
    t.set(1, 2, 0, 1.0);
    assert!(t.max_jacobi_residual() > 0.5);
}

#[test]
fn gravity_equivalence_principle() {
    let t = parse_param_table(GRAVITY_CONTRACTED_TABLE).unwrap();
    let r = equivalence_check(&t).unwrap();
    assert!(r.holds(), "{r:?}");
    assert_eq!(r.free, vec!["J[t,v,h0x]^phi = m*c - g".to_string()]);

    let full = parse_param_table(GRAVITY_FULL_TABLE).unwrap();
    let rf = equivalence_check(&full).unwrap();
    assert!(!rf.free.is_empty());
    assert!(!rf.at_mc.is_empty());
}

#[test]
fn param_table_parsing() {
    let t = parse_param_table(
        "generators t x v phi\nparams m\ncentral phi\nC[x,v,phi] = -m\nC[t,v,x] = 1\n",
    )
    .unwrap();
    let num = t.evaluate(&params(&[("m", 2.5)])).unwrap();
    assert_eq!(num.entry("v", "x", "phi").unwrap(), 2.5);
    assert!(t.jacobi_residuals().is_empty());
    assert!(parse_param_table("generators a b\nC[a,a,b] = 1\n").is_err());
    assert!(parse_param_table("generators a b\nC[a,b,b] = sin(1)\n").is_err());
    assert!(parse_param_table("generators a b\nC[a,b,b] = 1\nC[b,a,b] = 2\n").is_err());
    let e = parse_param_table("generators a b\nC[a,q,b] = 1\n").unwrap_err();
    assert!(e.to_string().contains("line 2"));
}
