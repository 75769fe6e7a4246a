//! Convergence and conditioning studies for the equation of domain I on
//! `[-1/2, 1/2]`, which has a regular singular point at the midpoint.

use hyperspec::complex_plane::phi_ode_fourier;
use hyperspec::fourier::periodic_system;
use hyperspec::linalg::condition_number_2;
use hyperspec::real_line::{kummer_ode, Form};
use hyperspec::us::{self, OdeSpec};
use hyperspec::{ChebSeries, DomainGeometry, HypParams, C64};
use hyperspec_oracle::{closed_form_test, series_2f1, Params};
use serde_json::json;

use crate::error::{CliError, Result};
use crate::output::{finite_or_null, num, Document};

const HALF_WIDTH: f64 = 0.5;
const SAMPLES: usize = 101;
const ORACLE_DIGITS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Study {
    Convergence,
    Conditioning,
}

fn domain_i_spec(p: &HypParams) -> Result<OdeSpec> {
    Ok(kummer_ode(&p.normalized(), Form::Hypergeom).to_spec(HALF_WIDTH)?)
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningStudy {
    /// `(n, κ₂)` of the unpreconditioned ultraspherical system.
    pub us: Vec<(usize, f64)>,
    /// `(n, κ₂)` of Chebyshev collocation.
    pub ps: Vec<(usize, f64)>,
    /// `(N, κ₂)` of the Fourier boundary system with `N = 2K + 1` modes.
    pub fourier: Vec<(usize, f64)>,
}

impl ConditioningStudy {
    /// Fitted `p` in `κ ~ n^p`.
    pub fn us_exponent(&self) -> f64 {
        power_fit(&self.us)
    }

    pub fn ps_exponent(&self) -> f64 {
        power_fit(&self.ps)
    }

    /// Fitted `ρ` in `κ ~ e^{ρN}`.
    pub fn fourier_rate(&self) -> f64 {
        let xs: Vec<f64> = self.fourier.iter().map(|&(n, _)| n as f64).collect();
        let ys: Vec<f64> = self.fourier.iter().map(|&(_, k)| k.ln()).collect();
        slope(&xs, &ys)
    }
}

fn power_fit(data: &[(usize, f64)]) -> f64 {
    let xs: Vec<f64> = data.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = data.iter().map(|&(_, k)| k.ln()).collect();
    slope(&xs, &ys)
}

/// 2-norm condition numbers for the given sizes. Fourier systems use the
/// boundary equation of domain I for the ellipse with semi-axis `a_ellipse`.
pub fn conditioning(p: &HypParams, a_ellipse: f64, ns: &[usize], ks: &[usize]) -> Result<ConditioningStudy> {
    let spec = domain_i_spec(p)?;
    let mut study = ConditioningStudy {
        us: Vec::new(),
        ps: Vec::new(),
        fourier: Vec::new(),
    };
    for &n in ns {
        let (op, _) = us::assemble(&spec, n)?;
        study.us.push((n, condition_number_2(&op.to_dense())));
        let (m, _) = us::collocation_matrix(&spec, n)?;
        study.ps.push((n, condition_number_2(&m)));
    }
    let shape = DomainGeometry::new(a_ellipse)?.ellipse();
    let [a2, a1, a0] = phi_ode_fourier(&kummer_ode(&p.normalized(), Form::Hypergeom), shape);
    for &k in ks {
        let (op, _) = periodic_system(&a2, &a1, &a0, C64::new(1.0, 0.0), k)?;
        study.fourier.push((2 * k + 1, condition_number_2(&op.to_dense())));
    }
    Ok(study)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint {
    pub n: usize,
    /// Maximum error relative to `max |F|` on the interval.
    pub us_error: f64,
    pub ps_error: f64,
}

fn reference_values(p: &HypParams, xs: &[f64]) -> Result<Vec<C64>> {
    let example = p.a == C64::new(-1.0 / 3.0, 0.0) && p.b == C64::new(0.5, 0.0) && p.c == C64::new(0.5, 0.0);
    xs.iter()
        .map(|&x| {
            let z = C64::new(x, 0.0);
            if example {
                Ok(closed_form_test(z))
            } else {
                series_2f1(&Params::from(p), z, ORACLE_DIGITS)
                    .map(|v| v.to_c64())
                    .map_err(|e| CliError::Solver(hyperspec::Error::Internal(e.to_string())))
            }
        })
        .collect()
}

fn max_relative(values: impl Iterator<Item = C64>, reference: &[C64]) -> f64 {
    let scale = reference.iter().map(|v| v.norm()).fold(0.0, f64::max);
    values.zip(reference).map(|(v, r)| (v - r).norm()).fold(0.0, f64::max) / scale
}

/// Error of fixed-size ultraspherical and collocation solutions against the
/// closed form (cube-root example) or the series oracle.
pub fn convergence(p: &HypParams, ns: &[usize]) -> Result<Vec<ConvergencePoint>> {
    let spec = domain_i_spec(p)?;
    let xs = crate::grid::linspace(-HALF_WIDTH, HALF_WIDTH, SAMPLES);
    let reference = reference_values(p, &xs)?;
    ns.iter()
        .map(|&n| {
            let (y, _) = us::solve(&spec, n)?;
            let us_error = max_relative(xs.iter().map(|&x| y.eval(x)), &reference);
            let ps_error = match us::solve_collocation(&spec, n) {
                Ok(values) => {
                    let interp = ChebSeries::from_values(&values, spec.interval)?;
                    max_relative(xs.iter().map(|&x| interp.eval(x)), &reference)
                }
                Err(_) => f64::INFINITY,
            };
            Ok(ConvergencePoint { n, us_error, ps_error })
        })
        .collect()
}

pub fn conditioning_document(study: &ConditioningStudy, header: Vec<String>) -> Document {
    let mut rows = Vec::new();
    for (system, data) in [("us", &study.us), ("ps", &study.ps), ("fourier", &study.fourier)] {
        for &(n, k) in data.iter() {
            rows.push(vec![system.to_string(), n.to_string(), num(k)]);
        }
    }
    let fits = [
        ("us exponent", study.us_exponent()),
        ("ps exponent", study.ps_exponent()),
        ("fourier rate per mode", study.fourier_rate()),
    ];
    let pairs = |d: &[(usize, f64)]| d.iter().map(|&(n, k)| json!([n, finite_or_null(k)])).collect::<Vec<_>>();
    Document {
        header,
        columns: ["system", "n", "kappa"].map(String::from).to_vec(),
        rows,
        footer: fits.iter().map(|(name, v)| format!("fit {name}: {v:.3}")).collect(),
        json: json!({
            "us": pairs(&study.us),
            "ps": pairs(&study.ps),
            "fourier": pairs(&study.fourier),
            "fits": {
                "us_exponent": finite_or_null(fits[0].1),
                "ps_exponent": finite_or_null(fits[1].1),
                "fourier_rate": finite_or_null(fits[2].1),
            },
        }),
    }
}

pub fn convergence_document(points: &[ConvergencePoint], header: Vec<String>) -> Document {
    let rows = points
        .iter()
        .map(|p| vec![p.n.to_string(), num(p.us_error), num(p.ps_error)])
        .collect();
    let first_below = points.iter().find(|p| p.us_error < 1e-13).map(|p| p.n);
    let footer = vec![match first_below {
        Some(n) => format!("us error below 1e-13 from n = {n}"),
        None => "us error never below 1e-13".to_string(),
    }];
    Document {
        header,
        columns: ["n", "us_error", "ps_error"].map(String::from).to_vec(),
        rows,
        footer,
        json: json!({
            "points": points
                .iter()
                .map(|p| json!({"n": p.n, "us_error": finite_or_null(p.us_error), "ps_error": finite_or_null(p.ps_error)}))
                .collect::<Vec<_>>(),
            "us_below_1e-13_from": first_below,
        }),
    }
}
