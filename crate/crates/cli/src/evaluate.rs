//! Point evaluation with representations built on first use.
//!
//! Real arguments go through the real-line representation, everything else
//! through the complex one, so a given `z` always takes the same path.

use std::sync::OnceLock;

use hyperspec::{
    genericness_check, ComplexOptions, ComplexRepresentation, GenericnessReport, HypParams, HypRepresentation,
    RealOptions, C64,
};
use hyperspec_oracle::{closed_form_test, method_for, series_2f1, Params, DEFAULT_DIGITS};

use crate::error::{CliError, Result};

pub const DEFAULT_TOL: f64 = 1e-15;
pub const DEFAULT_N_MAX: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub params: HypParams,
    /// Real semi-axis of the ellipses.
    pub a_ellipse: f64,
    pub tol: f64,
    pub n_max: usize,
    pub epsilon: f64,
}

impl RunConfig {
    pub fn new(params: HypParams) -> Self {
        RunConfig {
            params,
            a_ellipse: hyperspec::geometry::DEFAULT_A,
            tol: DEFAULT_TOL,
            n_max: DEFAULT_N_MAX,
            epsilon: hyperspec::params::DEFAULT_EPSILON,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_ellipse > 0.5 && self.a_ellipse < 1.0) {
            return Err(CliError::Usage(format!("A must lie in (1/2, 1), got {}", self.a_ellipse)));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(CliError::Usage(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.n_max < 16 {
            return Err(CliError::Usage(format!("n-max must be at least 16, got {}", self.n_max)));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(CliError::Usage(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }

    pub fn real_options(&self) -> RealOptions {
        RealOptions {
            tol: self.tol,
            n_max: self.n_max,
            epsilon: self.epsilon,
            ..RealOptions::default()
        }
    }

    pub fn complex_options(&self) -> ComplexOptions {
        ComplexOptions {
            a: self.a_ellipse,
            tol: self.tol,
            laplace_n_max: self.n_max,
            real: self.real_options(),
            ..ComplexOptions::default()
        }
    }

    /// Parameters of the cube-root example, whose closed form is known.
    pub fn is_test_example(&self) -> bool {
        let p = &self.params;
        p.a == C64::new(-1.0 / 3.0, 0.0) && p.b == C64::new(0.5, 0.0) && p.c == C64::new(0.5, 0.0)
    }
}

/// One evaluated point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub z: C64,
    pub value: C64,
    pub domain: &'static str,
    pub branch: &'static str,
}

pub struct Evaluator {
    config: RunConfig,
    genericness: GenericnessReport,
    real: OnceLock<std::result::Result<HypRepresentation, String>>,
    complex: OnceLock<std::result::Result<ComplexRepresentation, String>>,
}

impl Evaluator {
    /// Fails for exactly degenerate parameters; near-degenerate ones are
    /// accepted with warnings.
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let genericness = genericness_check(&config.params, config.epsilon);
        if !genericness.passes() {
            return Err(CliError::Degenerate(hyperspec::Error::Degenerate(genericness.failures)));
        }
        Ok(Evaluator {
            config,
            genericness,
            real: OnceLock::new(),
            complex: OnceLock::new(),
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn warnings(&self) -> Vec<String> {
        self.genericness.warnings.iter().map(|w| w.to_string()).collect()
    }

    // Build errors are kept as text so that the cells stay `Sync`; the
    // error is rebuilt on each failing call.
    fn real(&self) -> Result<&HypRepresentation> {
        self.real
            .get_or_init(|| {
                HypRepresentation::build(&self.config.params, &self.config.real_options()).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| CliError::Solver(hyperspec::Error::Internal(e.clone())))
    }

    fn complex(&self) -> Result<&ComplexRepresentation> {
        self.complex
            .get_or_init(|| {
                ComplexRepresentation::build(&self.config.params, &self.config.complex_options())
                    .map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| CliError::Solver(hyperspec::Error::Internal(e.clone())))
    }

    /// Build whatever the given points need, up front.
    pub fn prepare(&self, points: &[C64]) -> Result<()> {
        if points.iter().any(|z| z.im == 0.0) {
            self.real()?;
        }
        if points.iter().any(|z| z.im != 0.0) {
            self.complex()?;
        }
        Ok(())
    }

    pub fn eval(&self, z: C64) -> Result<Record> {
        if z.re.is_nan() || z.im.is_nan() {
            return Err(CliError::Usage("z is NaN".into()));
        }
        if z.im == 0.0 {
            let x = z.re;
            let value = self.real()?.eval_real(x)?;
            let branch = if x > 1.0 && x.is_finite() {
                "lower edge of the cut"
            } else {
                "principal"
            };
            Ok(Record {
                z,
                value,
                domain: hyperspec::real_line::RealDomain::of(x).label(),
                branch,
            })
        } else {
            let (value, domain) = self.complex()?.eval_with_domain(z)?;
            Ok(Record {
                z,
                value,
                domain: domain.label(),
                branch: "principal",
            })
        }
    }

    /// Reference value where one is cheaply available: the closed form for
    /// the cube-root example, otherwise the series oracle where it converges.
    pub fn reference(&self, z: C64, use_oracle: bool) -> Option<C64> {
        if self.config.is_test_example() && z.re.is_finite() && z.im.is_finite() {
            return Some(closed_form_test(z));
        }
        if !use_oracle || method_for(z).is_none() {
            return None;
        }
        series_2f1(&Params::from(&self.config.params), z, DEFAULT_DIGITS)
            .ok()
            .map(|v| v.to_c64())
    }
}

/// `|x - y| / |y|`, or `|x - y|` when `y = 0`.
pub fn relative_error(x: C64, y: C64) -> f64 {
    let d = (x - y).norm();
    if y == C64::new(0.0, 0.0) {
        d
    } else {
        d / y.norm()
    }
}
