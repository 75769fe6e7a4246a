//! Sample grids on the real line, in a rectangle, on the Riemann sphere or
//! in elliptic coordinates on domain I.

use std::f64::consts::PI;

use hyperspec::{DomainGeometry, C64};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{CliError, Result};
use crate::evaluate::{relative_error, Evaluator};
use crate::output::{finite_or_null, json_complex, num, opt_num, Document};

pub const MAX_RESOLUTION: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Region {
    /// `resolution` points on `[x_min, x_max]`.
    RealLine,
    /// `resolution²` points on a rectangle, rows of constant `Im z`.
    ComplexRect,
    /// `resolution²` points equispaced in latitude and longitude on the
    /// Riemann sphere, avoiding the poles and the meridian through `z = 1`.
    Sphere,
    /// `resolution²` points equispaced in the elliptic coordinates `(r, φ)`
    /// of domain I.
    Ellipse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub region: Region,
    pub resolution: usize,
    pub x_range: (f64, f64),
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
}

impl GridSpec {
    pub fn new(region: Region, resolution: usize) -> Self {
        GridSpec {
            region,
            resolution,
            x_range: (-10.0, 10.0),
            re_range: (-3.0, 3.0),
            im_range: (-3.0, 3.0),
        }
    }
}

/// `n` equispaced points from `lo` to `hi` inclusive; one point is `lo`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|j| if j == n - 1 { hi } else { lo + (hi - lo) * j as f64 / (n - 1) as f64 })
            .collect(),
    }
}

pub fn points(spec: &GridSpec, a_ellipse: f64) -> Result<Vec<C64>> {
    let n = spec.resolution;
    if n == 0 || n > MAX_RESOLUTION {
        return Err(CliError::Usage(format!("resolution must lie in 1..={MAX_RESOLUTION}, got {n}")));
    }
    let real = |x: f64| C64::new(x, 0.0);
    Ok(match spec.region {
        Region::RealLine => {
            let (lo, hi) = spec.x_range;
            linspace(lo, hi, n).into_iter().map(real).collect()
        }
        Region::ComplexRect => {
            let xs = linspace(spec.re_range.0, spec.re_range.1, n);
            let ys = linspace(spec.im_range.0, spec.im_range.1, n);
            ys.iter().flat_map(|&y| xs.iter().map(move |&x| C64::new(x, y))).collect()
        }
        Region::Sphere => {
            let mut out = Vec::with_capacity(n * n);
            for j in 0..n {
                let theta = PI * (j as f64 + 0.5) / n as f64;
                let radius = 1.0 / (theta / 2.0).tan();
                for k in 0..n {
                    out.push(C64::from_polar(radius, 2.0 * PI * (k as f64 + 0.5) / n as f64));
                }
            }
            out
        }
        Region::Ellipse => {
            let shape = DomainGeometry::new(a_ellipse)?.ellipse();
            let rs = linspace(0.0, 1.0, n);
            let mut out = Vec::with_capacity(n * n);
            for &r in &rs {
                for k in 0..n {
                    out.push(shape.point(r, -PI + 2.0 * PI * k as f64 / n as f64));
                }
            }
            out
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub z: C64,
    pub value: Option<C64>,
    pub domain: &'static str,
    pub error: Option<f64>,
}

/// Evaluate in parallel; the output keeps the input order.
pub fn evaluate(evaluator: &Evaluator, points: &[C64], use_oracle: bool) -> Result<Vec<GridPoint>> {
    evaluator.prepare(points)?;
    Ok(points
        .par_iter()
        .map(|&z| match evaluator.eval(z) {
            Ok(rec) => GridPoint {
                z,
                value: Some(rec.value),
                domain: rec.domain,
                error: evaluator.reference(z, use_oracle).map(|r| relative_error(rec.value, r)),
            },
            Err(e) => {
                log::debug!("evaluation failed at {z}: {e}");
                GridPoint {
                    z,
                    value: None,
                    domain: "-",
                    error: None,
                }
            }
        })
        .collect())
}

/// Largest error over points at least `exclude` away from `z = 1`.
pub fn max_error(points: &[GridPoint], exclude: f64) -> Option<f64> {
    points
        .iter()
        .filter(|p| (p.z - 1.0).norm() >= exclude)
        .filter_map(|p| p.error)
        .fold(None, |acc, e| Some(acc.map_or(e, |m: f64| m.max(e))))
}

pub fn document(evaluator: &Evaluator, points: &[GridPoint], exclude: f64, header: Vec<String>) -> Document {
    let nan = C64::new(f64::NAN, f64::NAN);
    let rows = points
        .iter()
        .map(|p| {
            let v = p.value.unwrap_or(nan);
            vec![
                num(p.z.re),
                num(p.z.im),
                num(v.re),
                num(v.im),
                p.domain.to_string(),
                opt_num(p.error),
            ]
        })
        .collect();
    let failed = points.iter().filter(|p| p.value.is_none()).count();
    let mut footer = vec![format!("points: {}", points.len())];
    if failed > 0 {
        footer.push(format!("failed: {failed}"));
    }
    let max = max_error(points, exclude);
    if let Some(m) = max {
        footer.push(format!("max dF (|z - 1| >= {exclude}): {m:e}"));
    }
    let p = &evaluator.config().params;
    let json_points: Vec<_> = points
        .iter()
        .map(|pt| {
            json!({
                "z": json_complex(pt.z),
                "F": pt.value.map(json_complex),
                "domain": pt.domain,
                "dF": pt.error.map(finite_or_null),
            })
        })
        .collect();
    Document {
        header,
        columns: ["z_re", "z_im", "F_re", "F_im", "domain", "dF"].map(String::from).to_vec(),
        rows,
        footer,
        json: json!({
            "a": json_complex(p.a),
            "b": json_complex(p.b),
            "c": json_complex(p.c),
            "points": json_points,
            "max_dF": max,
        }),
    }
}
