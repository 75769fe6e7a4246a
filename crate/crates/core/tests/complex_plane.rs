//! Continuation into the complex plane: harmonicity and parity of the
//! fields, agreement in the overlaps of the domains and with the real line.

use std::f64::consts::PI;
use std::sync::OnceLock;

use hyperspec::complex_plane::{phi_ode_fourier, solve_on_boundary};
use hyperspec::fourier::solve_periodic;
use hyperspec::geometry::Ellipse;
use hyperspec::laplace::harmonic_residual;
use hyperspec::real_line::{kummer_ode, Form};
use hyperspec::{ComplexOptions, ComplexRepresentation, Domain, HypParams, HypRepresentation, RealOptions, C64};

fn cube_root() -> &'static ComplexRepresentation {
    static REP: OnceLock<ComplexRepresentation> = OnceLock::new();
    REP.get_or_init(|| {
        let p = HypParams::real(-1.0 / 3.0, 0.5, 0.5).unwrap();
        ComplexRepresentation::build(&p, &ComplexOptions::default()).unwrap()
    })
}

/// A generic complex parameter set.
fn generic() -> &'static ComplexRepresentation {
    static REP: OnceLock<ComplexRepresentation> = OnceLock::new();
    REP.get_or_init(|| {
        let p = HypParams::new(C64::new(0.7, 0.4), C64::new(-1.3, 0.2), C64::new(0.45, -0.6)).unwrap();
        ComplexRepresentation::build(&p, &ComplexOptions::default()).unwrap()
    })
}

fn exact(z: C64) -> C64 {
    (C64::new(1.0, 0.0) - z).powf(1.0 / 3.0)
}

fn rel(x: C64, y: C64) -> f64 {
    (x - y).norm() / y.norm()
}

#[test]
fn fields_are_harmonic() {
    for rep in [cube_root(), generic()] {
        for form in Form::ALL {
            let field = rep.field(form);
            let r = harmonic_residual(field).unwrap();
            assert!(r <= 1e-12, "{}: discrete residual {r:e}", form.name());
            // mean-value property on a circle inside the domain
            let shape = field.shape();
            let centre = shape.point(0.3, 0.7);
            let rho = 0.2 * shape.a.min(shape.b);
            let m = 64;
            let mean = (0..m)
                .map(|j| field.eval_at(centre + C64::from_polar(rho, 2.0 * PI * j as f64 / m as f64)))
                .sum::<C64>()
                / m as f64;
            let v = field.eval_at(centre);
            assert!((mean - v).norm() <= 1e-12 * v.norm().max(1.0), "{}: {mean} vs {v}", form.name());
        }
    }
}

#[test]
fn fields_have_radial_parity() {
    for rep in [cube_root(), generic()] {
        for form in Form::ALL {
            let field = rep.field(form);
            for k in field.k_min()..=field.k_max() {
                for j in 0..field.n() {
                    if (j as i64 + k).rem_euclid(2) == 1 {
                        assert_eq!(field.get(j, k), C64::new(0.0, 0.0), "{} ({j}, {k})", form.name());
                    }
                }
            }
        }
    }
}

/// Points inside both closures, away from the cuts.
fn overlap_points(rep: &ComplexRepresentation, a: Domain, b: Domain) -> Vec<C64> {
    let e = rep.geometry.ellipse();
    let r = rep.geometry.r;
    let inside = |z: C64, d: Domain| match d {
        Domain::I => e.contains(z),
        Domain::II => e.contains(C64::new(1.0, 0.0) - z),
        Domain::III => (z - 0.5).norm() >= r,
    };
    let mut out = Vec::new();
    for i in 0..=40 {
        for j in 1..=40 {
            let z = C64::new(-1.0 + 3.0 * i as f64 / 40.0, 0.03 * j as f64);
            for z in [z, z.conj()] {
                if inside(z, a) && inside(z, b) {
                    out.push(z);
                }
            }
        }
    }
    out
}

#[test]
fn overlapping_domains_agree() {
    for rep in [cube_root(), generic()] {
        for (a, b) in [(Domain::I, Domain::II), (Domain::I, Domain::III), (Domain::II, Domain::III)] {
            let pts = overlap_points(rep, a, b);
            assert!(pts.len() > 10, "{a:?}/{b:?}: {} points", pts.len());
            for z in pts {
                let (u, v) = (rep.eval_in(z, a).unwrap(), rep.eval_in(z, b).unwrap());
                assert!(rel(u, v) <= 1e-10, "{a:?}/{b:?} at {z}: {u} vs {v}");
            }
        }
        // the strip named for the I/II overlap
        for j in 1..=20 {
            for re in [0.41, 0.45, 0.5, 0.55, 0.59] {
                let z = C64::new(re, 0.05 * j as f64);
                if rep.geometry.ellipse().contains(z) && rep.geometry.ellipse().contains(C64::new(1.0, 0.0) - z) {
                    let (u, v) = (rep.eval_in(z, Domain::I).unwrap(), rep.eval_in(z, Domain::II).unwrap());
                    assert!(rel(u, v) <= 1e-10, "{z}");
                }
            }
        }
    }
}

#[test]
fn real_axis_matches_the_real_line() {
    for rep in [cube_root(), generic()] {
        let real = HypRepresentation::build(rep.params(), &RealOptions::default()).unwrap();
        for j in 0..=200 {
            let x = -20.0 + 40.0 * j as f64 / 200.0;
            if (x - 1.0).abs() < 0.05 {
                continue;
            }
            let z = C64::new(x, 0.0);
            let (u, v) = (rep.eval_complex(z).unwrap(), real.eval_real(x).unwrap());
            assert!(rel(u, v) <= 1e-12, "x = {x}: {u} vs {v}");
        }
    }
}

#[test]
fn conjugate_symmetry_for_real_parameters() {
    let rep = cube_root();
    for z in [C64::new(0.3, 0.4), C64::new(2.0, 0.1), C64::new(-4.0, 7.0), C64::new(0.9, 0.5)] {
        let (u, v) = (rep.eval_complex(z).unwrap(), rep.eval_complex(z.conj()).unwrap());
        assert!((u - v.conj()).norm() <= 1e-13 * u.norm());
    }
}

#[test]
fn cube_root_across_the_plane() {
    let rep = cube_root();
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        for j in 0..100 {
            let z = C64::new(-3.0 + 6.0 * i as f64 / 99.0, -3.0 + 6.0 * j as f64 / 99.0 + 1e-3);
            worst = worst.max(rel(rep.eval_complex(z).unwrap(), exact(z)));
        }
    }
    assert!(worst <= 1e-12, "worst {worst:e}");
    for z in [C64::new(1e6, 1.0), C64::new(-1e9, -3.0), C64::new(0.0, 1e12)] {
        assert!(rel(rep.eval_complex(z).unwrap(), exact(z)) <= 1e-12, "{z}");
    }
}

#[test]
fn cube_root_on_an_elliptic_grid() {
    let rep = cube_root();
    let e = rep.geometry.ellipse();
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let r = i as f64 / 199.0;
        for k in 0..200 {
            let z = e.point(r, -PI + 2.0 * PI * k as f64 / 200.0);
            worst = worst.max(rel(rep.eval_in(z, Domain::I).unwrap(), exact(z)));
        }
    }
    assert!(worst <= 1e-11, "worst {worst:e}");
}

#[test]
fn resolution_of_the_continuation() {
    let rep = cube_root();
    for form in Form::ALL {
        let s = rep.stats(form);
        assert!(s.radial_n <= 512 && s.k_max - s.k_min < 300, "{}: {s:?}", form.name());
    }
    // the constant solution needs a single mode
    let s = rep.stats(Form::TTilde);
    assert!(s.k_max - s.k_min <= 2, "{s:?}");
}

/// The Fourier-space boundary solve agrees with the ultraspherical one
/// while its system is still well conditioned; it degrades exponentially
/// beyond that.
#[test]
fn fourier_boundary_solve_agrees_before_ill_conditioning() {
    let p = HypParams::real(-1.0 / 3.0, 0.5, 0.5).unwrap();
    let ode = kummer_ode(&p, Form::Hypergeom);
    let shape = Ellipse::new(0.1, 0.12).unwrap();
    let value = exact(C64::new(-0.1, 0.0));
    let us = solve_on_boundary(&ode, shape, value, 1e-15, 1024).unwrap();
    let [a2, a1, a0] = phi_ode_fourier(&ode, shape);
    let err = |k: usize| {
        let f = solve_periodic(&a2, &a1, &a0, value, k).unwrap();
        (0..50)
            .map(|j| -3.0 + 0.12 * j as f64)
            .map(|phi| (f.eval(phi) - us.series.eval(phi)).norm())
            .fold(0.0, f64::max)
    };
    assert!(err(8) <= 1e-8, "K = 8: {:e}", err(8));
    assert!(err(24) > 1e3 * err(8), "expected the error to grow with K");
}
