//! Real-line representation: matching, symmetry, the cube-root example and
//! degenerate parameters.

use hyperspec::real_line::{kummer_forms, Extents, RealDomain};
use hyperspec::{genericness_check, Error, HypParams, HypRepresentation, RealOptions, C64};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config(cases: u32, seed: u64) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn build(p: &HypParams) -> HypRepresentation {
    HypRepresentation::build(p, &RealOptions::default()).unwrap()
}

/// Complex triples at least 0.05 away from every degenerate set.
fn generic_triple() -> impl Strategy<Value = HypParams> {
    let part = || (-2.0..2.0f64, -1.0..1.0f64);
    (part(), part(), part())
        .prop_map(|(a, b, c)| {
            HypParams::new(C64::new(a.0, a.1), C64::new(b.0, b.1), C64::new(c.0 + 0.5, c.1)).unwrap()
        })
        .prop_filter("generic", |p| {
            let g = genericness_check(p, 1e-6);
            g.dist_c.min(g.dist_c_minus_a_minus_b).min(g.dist_b_minus_a) > 0.05
        })
}

/// Relative mismatch of value and first derivative through two domains.
fn c1_mismatch(rep: &HypRepresentation, x: f64, left: RealDomain, right: RealDomain) -> f64 {
    let l = rep.eval_real_jet_in(x, left).unwrap();
    let r = rep.eval_real_jet_in(x, right).unwrap();
    let scale = l[0].norm().max(l[1].norm()).max(1e-300);
    (l[0] - r[0]).norm().max((l[1] - r[1]).norm()) / scale
}

proptest! {
    #![proptest_config(config(20, 0x5eed_0002))]

    #[test]
    fn c1_matching_at_all_junctions(p in generic_triple()) {
        let rep = build(&p);
        for (x, l, r) in [
            (0.5, RealDomain::I, RealDomain::II),
            (-0.5, RealDomain::I, RealDomain::III),
            (1.5, RealDomain::II, RealDomain::III),
        ] {
            let m = c1_mismatch(&rep, x, l, r);
            prop_assert!(m <= 1e-11, "{p:?}: mismatch {m:e} at x = {x}");
        }
    }
}

proptest! {
    #![proptest_config(config(12, 0x5eed_0003))]

    #[test]
    fn symmetric_in_a_and_b(p in generic_triple()) {
        let rep = build(&p);
        let swapped = build(&HypParams::new(p.b, p.a, p.c).unwrap());
        for x in [-40.0, -2.0, -0.3, 0.2, 0.7, 1.3, 2.5, 60.0] {
            let (u, v) = (rep.eval_real(x).unwrap(), swapped.eval_real(x).unwrap());
            prop_assert!((u - v).norm() <= 1e-12 * u.norm().max(1e-300), "x = {x}: {u} vs {v}");
        }
    }

    #[test]
    fn local_solutions_satisfy_their_equations(p in generic_triple()) {
        let rep = build(&p);
        let specs = kummer_forms(&rep.params, Extents::default()).unwrap();
        for (spec, sol) in specs.iter().zip(&rep.locals.solutions) {
            let scale = sol.y.max_abs() * (1.0 + sol.d2y.max_abs() / sol.y.max_abs().max(1e-300));
            for j in 0..=20 {
                let l = -1.0 + j as f64 / 10.0;
                let res = spec.residual_at(&sol.y, l).norm();
                prop_assert!(res <= 1e-10 * scale.max(1.0), "residual {res:e} at {l}");
            }
        }
    }
}

fn cube_root() -> HypParams {
    HypParams::real(-1.0 / 3.0, 0.5, 0.5).unwrap()
}

#[test]
fn cube_root_on_the_real_line() {
    let rep = build(&cube_root());
    let mut worst: f64 = 0.0;
    for j in 0..1000 {
        let x = -10.0 + 20.0 * j as f64 / 999.0;
        if (x - 1.0).abs() < 0.05 {
            continue;
        }
        let exact = C64::new(1.0 - x, 0.0).powf(1.0 / 3.0);
        worst = worst.max((rep.eval_real(x).unwrap() - exact).norm() / exact.norm());
    }
    assert!(worst <= 1e-12, "worst relative error {worst:e}");
    // the point at infinity and the far field
    let far = rep.eval_real(1e8).unwrap();
    assert!((far - C64::new(1.0 - 1e8, 0.0).powf(1.0 / 3.0)).norm() <= 1e-12 * far.norm());
}

#[test]
fn cube_root_connection_constants() {
    let c = build(&cube_root()).constants;
    let expected = [0.0, 1.0, 1.0, 0.0];
    for (got, want) in [c.alpha, c.beta, c.gamma, c.delta].into_iter().zip(expected) {
        assert!((got - want).norm() <= 1e-13, "{got} vs {want}");
    }
}

#[test]
fn cube_root_resolution() {
    let n = build(&cube_root()).n_used();
    let reference = [28, 28, 1, 30, 27];
    for (got, limit) in n.iter().zip(reference) {
        assert!(*got <= limit + 8, "{n:?}");
    }
    assert_eq!(n[2], 1, "the constant solution needs one coefficient");
}

#[test]
fn exact_degeneracy_is_rejected_with_the_condition() {
    let p = HypParams::real(1.0, 1.0, 2.0).unwrap();
    match HypRepresentation::build(&p, &RealOptions::default()) {
        Err(Error::Degenerate(conds)) => {
            let text = Error::Degenerate(conds).to_string();
            assert!(text.contains("b - a") && text.contains("c - a - b"), "{text}");
        }
        other => panic!("expected a degeneracy error, got {other:?}"),
    }
    let p = HypParams::real(0.3, 0.7, -2.0).unwrap();
    let err = HypRepresentation::build(&p, &RealOptions::default()).unwrap_err();
    assert!(err.to_string().contains("c equals the integer -2"), "{err}");
}

#[test]
fn near_degeneracy_warns_and_evaluates() {
    let p = HypParams::real(1.0, 1.0 + 1e-7, 2.5).unwrap();
    let report = genericness_check(&p, 1e-6);
    assert!(report.passes());
    assert_eq!(report.warnings.len(), 1);
    assert!(report.warnings[0].to_string().contains("b - a"));
    let rep = build(&p);
    // F(1, 1, 5/2; x) has no simple form but is finite and smooth
    let v = rep.eval_real(0.5).unwrap();
    assert!(v.is_finite() && (v.re - 1.2876110541960724).abs() < 1e-6);
}

#[test]
fn lower_edge_of_the_cut() {
    // (1 - x)^{1/3} for x > 1 continues from Im z < 0
    let rep = build(&cube_root());
    let v = rep.eval_real(9.0).unwrap();
    let below = C64::new(-8.0, 0.0).powf(1.0 / 3.0);
    assert!((v - below).norm() < 1e-13, "{v}");
    assert!(v.im > 0.0);
}
