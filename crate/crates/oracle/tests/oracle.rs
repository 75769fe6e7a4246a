use hyperspec_oracle::{
    closed_form_test, closed_form_test_big, method_for, relative_difference, series_2f1, series_2f1_with,
    table_reference, Method, OracleError, Params, Table, C64, DEFAULT_DIGITS,
};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn two_log_two() {
    let f = series_2f1(&Params::real(1.0, 1.0, 2.0), c(0.5, 0.0), DEFAULT_DIGITS).unwrap();
    let v = f.to_c64();
    assert!((v.re - 2.0 * std::f64::consts::LN_2).abs() < 1e-16);
    assert_eq!(v.im, 0.0);
}

#[test]
fn cube_root_closed_form() {
    let p = Params::real(-1.0 / 3.0, 0.5, 0.5);
    for z in [c(0.3, 0.2), c(-0.6, 0.1), c(-4.0, 3.0), c(0.2, -0.65), c(-15.0, -1.0)] {
        let series = series_2f1(&p, z, 30).unwrap();
        let exact = closed_form_test_big(z, 30).unwrap();
        let rel = relative_difference(&series, &exact, 30).unwrap();
        // -1/3 is rounded in double precision, which moves F by ~1e-17
        assert!(rel < 1e-16, "z = {z}: {rel:e}");
        assert!((exact.to_c64() - closed_form_test(z)).norm() < 1e-15 * closed_form_test(z).norm());
    }
}

#[test]
fn direct_and_pfaff_agree() {
    let cases = [
        (Params::real(0.1, 0.2, -0.3), c(-0.5, 0.3)),
        (Params::new(c(2.0, 8.0), c(3.0, -5.0), c(1.4, -3.1)), c(-0.4, -0.2)),
        (Params::real(2.25, 3.75, -0.5), c(-0.6, 0.0)),
    ];
    for (p, z) in cases {
        let d = series_2f1_with(&p, z, 35, Method::Direct).unwrap();
        let q = series_2f1_with(&p, z, 35, Method::Pfaff).unwrap();
        let rel = relative_difference(&d, &q, 35).unwrap();
        assert!(rel < 1e-32, "{p:?} at {z}: {rel:e}");
    }
}

#[test]
fn rejects_poles_and_far_arguments() {
    let p = Params::real(1.0, 1.0, -2.0);
    assert!(matches!(series_2f1(&p, c(0.1, 0.0), 20), Err(OracleError::PoleInC(_))));
    let p = Params::real(1.0, 1.0, 2.0);
    assert!(matches!(series_2f1(&p, c(0.9, 0.0), 20), Err(OracleError::OutOfRange(_))));
    assert!(matches!(series_2f1(&p, c(3.0, 1.0), 20), Err(OracleError::OutOfRange(_))));
    assert_eq!(method_for(c(0.4, 0.5)), Some(Method::Direct));
    assert_eq!(method_for(c(-3.0, 2.0)), Some(Method::Pfaff));
    assert_eq!(method_for(c(0.6, 0.6)), None);
}

#[test]
fn terminating_series() {
    // F(-2, b, c; z) is a quadratic
    let p = Params::real(-2.0, 1.5, 2.5);
    let z = c(0.4, 0.1);
    let f = series_2f1(&p, z, 30).unwrap().to_c64();
    let exact = 1.0 - 2.0 * 1.5 / 2.5 * z + (-2.0 * -1.0) * (1.5 * 2.5) / (2.5 * 3.5 * 2.0) * z * z;
    assert!((f - exact).norm() < 1e-15);
}

#[test]
fn table_rows_load() {
    let rows = table_reference();
    assert_eq!(rows.len(), 19);
    assert_eq!(rows.iter().filter(|r| r.table == Table::RealArgument).count(), 9);
    assert!(rows.iter().all(|r| r.reported_delta > 0.0));
    assert_eq!(rows[8].reported_n, Some(160));
    assert_eq!(rows[12].reported_n, None);
}

#[test]
fn printed_values_match_references_to_printed_digits() {
    for (i, r) in table_reference().iter().enumerate() {
        let (ure, uim) = r.last_digit;
        let reference = r.reference.unwrap();
        assert!((r.value.re - reference.re).abs() <= ure * 1.000_001, "row {}", i + 1);
        assert!((r.value.im - reference.im).abs() <= uim * 1.000_001, "row {}", i + 1);
    }
}

#[test]
fn series_reproduces_frozen_references() {
    let mut checked = 0;
    for (i, r) in table_reference().iter().enumerate() {
        if method_for(r.z).is_none() {
            continue;
        }
        let reference = r.reference.unwrap();
        let v = series_2f1(&r.params, r.z, DEFAULT_DIGITS).unwrap().to_c64();
        let rel = (v - reference).norm() / reference.norm();
        assert!(rel < 1e-15, "row {}: {v} vs {reference} ({rel:e})", i + 1);
        checked += 1;
    }
    assert!(checked >= 8, "only {checked} rows in range");
}
