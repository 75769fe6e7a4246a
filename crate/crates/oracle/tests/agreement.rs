//! The spectral representation against the multiprecision series, for
//! parameter sets with no closed form.

use hyperspec::{ComplexOptions, ComplexRepresentation, HypParams, HypRepresentation, RealOptions, C64};
use hyperspec_oracle::{series_2f1, Params};

fn triples() -> Vec<HypParams> {
    let c = C64::new;
    [
        (c(0.25, 0.0), c(0.6, 0.0), c(1.35, 0.0)),
        (c(-1.7, 0.0), c(2.2, 0.0), c(0.8, 0.0)),
        (c(0.5, 0.3), c(-0.4, 1.1), c(1.9, -0.2)),
        (c(1.3, -0.8), c(0.15, 0.0), c(-0.55, 0.4)),
    ]
    .into_iter()
    .map(|(a, b, c)| HypParams::new(a, b, c).unwrap())
    .collect()
}

fn reference(p: &HypParams, z: C64) -> C64 {
    series_2f1(&Params::from(p), z, 30).unwrap().to_c64()
}

#[test]
fn real_line_agrees_with_the_series() {
    for p in triples() {
        let rep = HypRepresentation::build(&p, &RealOptions::default()).unwrap();
        for j in 0..=40 {
            let x = -0.4 + 0.02 * j as f64;
            let (u, v) = (rep.eval_real(x).unwrap(), reference(&p, C64::new(x, 0.0)));
            assert!((u - v).norm() <= 1e-12 * v.norm(), "{p:?} at {x}: {u} vs {v}");
        }
    }
}

#[test]
fn complex_plane_agrees_with_the_series() {
    for p in triples().into_iter().take(3) {
        let rep = ComplexRepresentation::build(&p, &ComplexOptions::default()).unwrap();
        for j in 0..24 {
            let theta = std::f64::consts::PI * (2.0 * j as f64 + 1.0) / 24.0;
            for r in [0.1, 0.25, 0.4] {
                let z = C64::from_polar(r, theta);
                let (u, v) = (rep.eval_complex(z).unwrap(), reference(&p, z));
                assert!((u - v).norm() <= 1e-12 * v.norm(), "{p:?} at {z}: {u} vs {v}");
            }
        }
    }
}
