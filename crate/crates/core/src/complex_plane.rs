//! `F(a, b, c; z)` on the Riemann sphere.
//!
//! Each of the five local solutions is continued from the real line into its
//! domain: its value at the left end of the real interval fixes a periodic
//! solution of the ODE restated in the boundary angle `φ`, and the boundary
//! data are extended into the interior as a harmonic (in fact analytic)
//! function. The connection constants found on the real line then assemble
//! `F` everywhere.

use rayon::prelude::*;

use crate::cheb::{ChebSeries, Endpoint, Interval, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::fourier::{equispaced_angles, fourier_transform, FourierSeries};
use crate::geometry::{DomainGeometry, Ellipse, DEFAULT_A};
use crate::laplace::{laplace_solve_adaptive, ChebFourierField};
use crate::params::HypParams;
use crate::real_line::{kummer_ode, ConnectionConstants, Extents, Form, HypRepresentation, PolyOde, RealOptions};
use crate::us::{solve_adaptive, Constraint, OdeSpec, SolveReport};

pub use crate::real_line::RealDomain as Domain;

/// Fourier modes below this fraction of the largest are dropped.
pub const FOURIER_TRUNCATION: f64 = 2.2e-16;

/// Chebyshev samples of the trigonometric φ-ODE coefficients. Their
/// coefficients fall off super-exponentially past degree ~40 down to a
/// rounding plateau near 1e-15 relative, which the chop removes; otherwise
/// the plateau would set the operator bandwidth.
const COEFFICIENT_SAMPLES: usize = 64;
const COEFFICIENT_CHOP: f64 = 1e-14;

/// `(a₂, a₁, a₀)` of `p y'' + q y' + r y = 0` restated on the boundary
/// `w(φ) = P e^{iφ} + Q e^{-iφ}` of `shape`, using `w_φφ = -w`:
/// `a₂ = w_φ p`, `a₁ = q w_φ² + p w`, `a₀ = r w_φ³`.
pub fn phi_coefficients(ode: &PolyOde, shape: Ellipse, phi: f64) -> [C64; 3] {
    let w = shape.point(1.0, phi);
    let wp = shape.boundary_derivative(phi);
    let p = ode.p_at(w);
    [wp * p, ode.q_at(w) * wp * wp + p * w, ode.r_at(w) * wp * wp * wp]
}

/// The φ-ODE on `[-π, π]` with `y(-π) = y(π) = value`.
pub fn phi_ode(ode: &PolyOde, shape: Ellipse, value: C64) -> Result<OdeSpec> {
    let pi = std::f64::consts::PI;
    OdeSpec::from_fns(
        |phi| phi_coefficients(ode, shape, phi)[0],
        |phi| phi_coefficients(ode, shape, phi)[1],
        |phi| phi_coefficients(ode, shape, phi)[2],
        Interval::new(-pi, pi)?,
        vec![
            Constraint::endpoint(Endpoint::Left, value),
            Constraint::endpoint(Endpoint::Right, value),
        ],
        COEFFICIENT_SAMPLES,
        COEFFICIENT_CHOP,
    )
}

/// Fourier coefficients of the φ-ODE coefficients (each has at most modes
/// `|k| <= 4`), for the Fourier-space diagnostic solver.
pub fn phi_ode_fourier(ode: &PolyOde, shape: Ellipse) -> [FourierSeries; 3] {
    let m = 33;
    let samples: Vec<[C64; 3]> = equispaced_angles(m)
        .into_iter()
        .map(|phi| phi_coefficients(ode, shape, phi))
        .collect();
    let series = |i: usize| {
        let values: Vec<C64> = samples.iter().map(|s| s[i]).collect();
        fourier_transform(&values).trimmed(1e-15)
    };
    [series(0), series(1), series(2)]
}

/// Solution of a φ-ODE and its truncated Fourier coefficients.
#[derive(Debug, Clone)]
pub struct BoundarySolution {
    pub series: ChebSeries,
    pub fourier: FourierSeries,
    pub report: SolveReport,
}

/// Solve the φ-ODE of `ode` on the boundary of `shape` with the US method,
/// then sample and transform to Fourier coefficients.
pub fn solve_on_boundary(ode: &PolyOde, shape: Ellipse, value: C64, tol: f64, n_max: usize) -> Result<BoundarySolution> {
    let spec = phi_ode(ode, shape, value)?;
    let (series, report) = solve_adaptive(&spec, tol, n_max)?;
    let m = (2 * report.n_used).next_power_of_two().max(256);
    let values: Vec<C64> = equispaced_angles(m).into_iter().map(|phi| series.eval(phi)).collect();
    let fourier = fourier_transform(&values).trimmed(FOURIER_TRUNCATION);
    Ok(BoundarySolution { series, fourier, report })
}

/// `w^e` with the principal branch, except that on the negative real axis
/// `arg w = negative_arg`. At `w = 0` the value is 0 for `Re e > 0`, 1 for
/// `e = 0` and an error otherwise.
pub fn complex_power(w: C64, e: C64, negative_arg: f64) -> Result<C64> {
    if w == ZERO {
        return if e == ZERO {
            Ok(ONE)
        } else if e.re > 0.0 {
            Ok(ZERO)
        } else {
            Err(Error::NearSingularity(format!("the local variable is 0 and 0^({e}) is unbounded")))
        };
    }
    let arg = if w.im == 0.0 && w.re < 0.0 { negative_arg } else { w.arg() };
    Ok((e * C64::new(w.norm().ln(), arg)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexOptions {
    /// Real semi-axis of the ellipses.
    pub a: f64,
    /// Tolerance of the boundary and Laplace solves.
    pub tol: f64,
    pub boundary_n_max: usize,
    pub laplace_n_max: usize,
    /// Options of the real-line solves; their extents are overridden to
    /// cover the domain boundaries.
    pub real: RealOptions,
}

impl Default for ComplexOptions {
    fn default() -> Self {
        ComplexOptions {
            a: DEFAULT_A,
            tol: 1e-15,
            boundary_n_max: 2048,
            laplace_n_max: 512,
            real: RealOptions::default(),
        }
    }
}

/// Sizes of one domain's continuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldStats {
    /// Chebyshev coefficients of the boundary solution in φ.
    pub boundary_n: usize,
    pub k_min: i64,
    pub k_max: i64,
    /// Chebyshev degree of the Laplace solution.
    pub radial_n: usize,
}

/// `F(a, b, c; z)` for complex `z`.
#[derive(Debug, Clone)]
pub struct ComplexRepresentation {
    pub real: HypRepresentation,
    pub geometry: DomainGeometry,
    fields: Vec<ChebFourierField>,
    stats: Vec<FieldStats>,
}

impl ComplexRepresentation {
    pub fn build(params: &HypParams, opts: &ComplexOptions) -> Result<Self> {
        let geometry = DomainGeometry::new(opts.a)?;
        let real_opts = RealOptions {
            extents: Extents {
                near: geometry.a,
                far: 1.0 / geometry.r,
            },
            ..opts.real
        };
        let real = HypRepresentation::build(params, &real_opts)?;
        let built: Vec<(ChebFourierField, FieldStats)> = Form::ALL
            .par_iter()
            .map(|&form| {
                let shape = match form {
                    Form::S | Form::STilde => geometry.disk(),
                    _ => geometry.ellipse(),
                };
                let ode = kummer_ode(&real.params, form);
                let value = real.locals.get(form).y.eval(-shape.a);
                let boundary = solve_on_boundary(&ode, shape, value, opts.tol, opts.boundary_n_max)?;
                let field = laplace_solve_adaptive(&boundary.fourier, shape, opts.tol, opts.laplace_n_max)?;
                let stats = FieldStats {
                    boundary_n: boundary.report.n_used,
                    k_min: field.k_min(),
                    k_max: field.k_max(),
                    radial_n: field.n(),
                };
                Ok((field, stats))
            })
            .collect::<Result<_>>()?;
        let (fields, stats) = built.into_iter().unzip();
        Ok(ComplexRepresentation {
            real,
            geometry,
            fields,
            stats,
        })
    }

    pub fn params(&self) -> &HypParams {
        &self.real.params
    }

    pub fn constants(&self) -> ConnectionConstants {
        self.real.constants
    }

    pub fn field(&self, form: Form) -> &ChebFourierField {
        &self.fields[form.index()]
    }

    pub fn stats(&self, form: Form) -> FieldStats {
        self.stats[form.index()]
    }

    /// The domain used for `z`: I inside the ellipse around 0, else II
    /// inside the ellipse around 1, else III.
    pub fn domain_of(&self, z: C64) -> Domain {
        let e = self.geometry.ellipse();
        if z.re.is_infinite() || z.im.is_infinite() {
            Domain::III
        } else if e.contains(z) {
            Domain::I
        } else if e.contains(ONE - z) {
            Domain::II
        } else {
            Domain::III
        }
    }

    pub fn eval_complex(&self, z: C64) -> Result<C64> {
        Ok(self.eval_with_domain(z)?.0)
    }

    pub fn eval_with_domain(&self, z: C64) -> Result<(C64, Domain)> {
        if z.re.is_nan() || z.im.is_nan() {
            return Err(Error::InvalidArgument("z is NaN".into()));
        }
        let d = self.domain_of(z);
        Ok((self.eval_in(z, d)?, d))
    }

    /// Evaluate through a specific domain's representation; `z` must lie in
    /// its closure.
    pub fn eval_in(&self, z: C64, domain: Domain) -> Result<C64> {
        let ConnectionConstants {
            alpha,
            beta,
            gamma,
            delta,
        } = self.real.constants;
        let p = &self.real.params;
        let pi = std::f64::consts::PI;
        match domain {
            Domain::I if z == ZERO => Ok(ONE),
            Domain::I => Ok(self.local(Form::Hypergeom, z)?),
            Domain::II => {
                let t = ONE - z;
                let kappa = p.kappa();
                if t.norm() < self.real.options.guard && kappa.re <= 0.0 && beta != ZERO {
                    return Err(Error::NearSingularity(format!("z = {z} is within the guard radius of z = 1")));
                }
                let mut f = alpha * self.local(Form::T, t)?;
                if beta != ZERO {
                    // the real axis t < 0 is the lower edge in z, which is arg t = π
                    f += beta * complex_power(t, kappa, pi)? * self.local(Form::TTilde, t)?;
                }
                Ok(f)
            }
            Domain::III => {
                let s = if z.re.is_infinite() || z.im.is_infinite() {
                    ZERO
                } else {
                    -ONE / (z - 0.5)
                };
                let mut f = ZERO;
                if gamma != ZERO {
                    f += gamma * complex_power(s, p.a, -pi)? * self.local(Form::S, s)?;
                }
                if delta != ZERO {
                    f += delta * complex_power(s, p.b, -pi)? * self.local(Form::STilde, s)?;
                }
                Ok(f)
            }
        }
    }

    /// Value of one local solution at its own variable `w`.
    pub fn local(&self, form: Form, w: C64) -> Result<C64> {
        let field = self.field(form);
        let (r, phi) = field.shape().coordinates(w);
        if r > 1.0 + 1e-12 {
            return Err(Error::Internal(format!(
                "{w} lies outside the domain of the {} solution (r = {r})",
                form.name()
            )));
        }
        Ok(field.eval(r.min(1.0), phi))
    }
}
