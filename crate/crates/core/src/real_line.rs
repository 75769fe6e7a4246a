//! The hypergeometric function on the compactified real line.
//!
//! Three domains cover `ℝ ∪ {∞}`:
//! - I: `|x| ≤ 1/2`, local variable `x`;
//! - II: `1/2 < x ≤ 3/2`, local variable `t = 1 - x`;
//! - III: the rest, local variable `s = -1/(x - 1/2)`, with `x = ∞` at `s = 0`.
//!
//! Each local solution is regular at the local origin and normalized to 1
//! there. Domains II and III combine two of them with power prefactors and
//! connection constants fixed by `C¹` matching at `x = ±1/2`.

use rayon::prelude::*;

use crate::cheb::{ChebSeries, Endpoint, Interval, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::params::{genericness_check, GenericnessReport, HypParams, DEFAULT_EPSILON};
use crate::us::{self, Constraint, OdeSpec, SolveReport};

/// Matching systems with a larger condition number are rejected.
pub const MATCHING_CONDITION_LIMIT: f64 = 1e16;

/// The five local equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    /// The hypergeometric equation in `x`.
    Hypergeom,
    /// The same equation in `t = 1 - x`, exponent 0 at `t = 0`.
    T,
    /// Equation for `ũ` with `u = t^{c-a-b} ũ`.
    TTilde,
    /// Equation for `v` with `y = s^a v`.
    S,
    /// Equation for `ṽ` with `y = s^b ṽ`.
    STilde,
}

impl Form {
    pub const ALL: [Form; 5] = [Form::Hypergeom, Form::T, Form::TTilde, Form::S, Form::STilde];

    pub fn index(self) -> usize {
        match self {
            Form::Hypergeom => 0,
            Form::T => 1,
            Form::TTilde => 2,
            Form::S => 3,
            Form::STilde => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Form::Hypergeom => "y_I",
            Form::T => "u_II",
            Form::TTilde => "u~_II",
            Form::S => "v_III",
            Form::STilde => "v~_III",
        }
    }
}

/// `p(w) y'' + q(w) y' + r(w) y = 0` with monomial coefficients (lowest
/// degree first) in the local variable `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyOde {
    pub p: Vec<C64>,
    pub q: Vec<C64>,
    pub r: Vec<C64>,
}

fn horner(m: &[C64], w: C64) -> C64 {
    m.iter().rev().fold(ZERO, |acc, c| acc * w + c)
}

impl PolyOde {
    pub fn p_at(&self, w: C64) -> C64 {
        horner(&self.p, w)
    }

    pub fn q_at(&self, w: C64) -> C64 {
        horner(&self.q, w)
    }

    pub fn r_at(&self, w: C64) -> C64 {
        horner(&self.r, w)
    }

    /// Map to `[-h, h]` with the single constraint `y(0) = 1`.
    pub fn to_spec(&self, half_width: f64) -> Result<OdeSpec> {
        OdeSpec::from_monomials(
            &self.p,
            &self.q,
            &self.r,
            Interval::symmetric(half_width)?,
            vec![Constraint::value_at(0.0, ONE)?],
        )
    }
}

/// The local equation of the given form.
pub fn kummer_ode(p: &HypParams, form: Form) -> PolyOde {
    let (a, b, c) = (p.a, p.b, p.c);
    let one = ONE;
    let quadratic = vec![ZERO, one, -one];
    let infinity_form = |a: C64, b: C64| {
        let mid = c - (a + b + 1.0) / 2.0;
        PolyOde {
            p: vec![ZERO, -one, ZERO, C64::new(0.25, 0.0)],
            q: vec![b - a - 1.0, mid, (a + 1.0) / 2.0],
            r: vec![a * mid, a * (a + 1.0) / 4.0],
        }
    };
    match form {
        Form::Hypergeom => PolyOde {
            p: quadratic,
            q: vec![c, -(one + a + b)],
            r: vec![-a * b],
        },
        Form::T => PolyOde {
            p: quadratic,
            q: vec![a + b + 1.0 - c, -(one + a + b)],
            r: vec![-a * b],
        },
        Form::TTilde => PolyOde {
            p: quadratic,
            q: vec![c - a - b + 1.0, -(c * 2.0 - a - b + 1.0)],
            r: vec![-(b - c) * (a - c)],
        },
        Form::S => infinity_form(a, b),
        Form::STilde => infinity_form(b, a),
    }
}

/// Half-widths of the intervals the five forms are solved on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extents {
    /// Interval `[-h, h]` for the forms in `x` and in `t`.
    pub near: f64,
    /// Interval `[-h, h]` for the forms in `s`.
    pub far: f64,
}

impl Default for Extents {
    fn default() -> Self {
        Extents { near: 0.5, far: 1.0 }
    }
}

impl Extents {
    pub fn of(&self, form: Form) -> f64 {
        match form {
            Form::S | Form::STilde => self.far,
            _ => self.near,
        }
    }
}

/// The five local ODEs as solver specifications.
pub fn kummer_forms(p: &HypParams, extents: Extents) -> Result<Vec<OdeSpec>> {
    Form::ALL
        .iter()
        .map(|&f| kummer_ode(p, f).to_spec(extents.of(f)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealOptions {
    pub tol: f64,
    pub n_max: usize,
    pub epsilon: f64,
    /// Points closer than this to `x = 1` are rejected unless the value is
    /// finite there.
    pub guard: f64,
    pub extents: Extents,
}

impl Default for RealOptions {
    fn default() -> Self {
        RealOptions {
            tol: 1e-15,
            n_max: 512,
            epsilon: DEFAULT_EPSILON,
            guard: 1e-6,
            extents: Extents::default(),
        }
    }
}

/// A local solution with its first two derivatives.
#[derive(Debug, Clone)]
pub struct LocalSolution {
    pub y: ChebSeries,
    pub dy: ChebSeries,
    pub d2y: ChebSeries,
    pub report: SolveReport,
}

impl LocalSolution {
    fn new(y: ChebSeries, report: SolveReport) -> Self {
        let dy = y.derivative();
        let d2y = dy.derivative();
        LocalSolution { y, dy, d2y, report }
    }

    /// `(y, y', y'')` at a real point of the local variable.
    pub fn jet(&self, w: f64) -> [C64; 3] {
        [self.y.eval(w), self.dy.eval(w), self.d2y.eval(w)]
    }

    /// `(y, y', y'')` at a complex point, by analytic continuation of the
    /// polynomials.
    pub fn jet_complex(&self, w: C64) -> [C64; 3] {
        [self.y.eval_complex(w), self.dy.eval_complex(w), self.d2y.eval_complex(w)]
    }

    /// First derivative, using the endpoint formula at the interval ends.
    pub fn derivative_at(&self, w: f64) -> C64 {
        let iv = self.y.interval();
        if w == iv.hi() {
            self.y.endpoint_derivative(Endpoint::Right)
        } else if w == iv.lo() {
            self.y.endpoint_derivative(Endpoint::Left)
        } else {
            self.dy.eval(w)
        }
    }
}

/// The five local solutions, indexed by [`Form::index`].
#[derive(Debug, Clone)]
pub struct LocalSolutionSet {
    pub solutions: Vec<LocalSolution>,
}

impl LocalSolutionSet {
    pub fn get(&self, form: Form) -> &LocalSolution {
        &self.solutions[form.index()]
    }

    pub fn n_used(&self) -> [usize; 5] {
        let mut n = [0; 5];
        for (slot, s) in n.iter_mut().zip(&self.solutions) {
            *slot = s.report.n_used;
        }
        n
    }
}

/// Solve the five local problems (in parallel).
pub fn solve_locals(p: &HypParams, opts: &RealOptions) -> Result<LocalSolutionSet> {
    let specs = kummer_forms(p, opts.extents)?;
    let solutions = specs
        .par_iter()
        .map(|spec| us::solve_adaptive(spec, opts.tol, opts.n_max).map(|(y, r)| LocalSolution::new(y, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalSolutionSet { solutions })
}

/// `w^e` for real `w` with the branch used on the real line: principal for
/// `w > 0`, `arg w = branch_arg` for `w < 0`. At `w = 0` the value is
/// 0 for `Re e > 0`, 1 for `e = 0` and an error otherwise.
pub fn real_power(w: f64, e: C64, branch_arg: f64) -> Result<C64> {
    if w == 0.0 {
        return if e == ZERO {
            Ok(ONE)
        } else if e.re > 0.0 {
            Ok(ZERO)
        } else {
            Err(Error::NearSingularity(format!("the local variable is 0 and 0^({e}) is unbounded")))
        };
    }
    let log = if w > 0.0 {
        C64::new(w.ln(), 0.0)
    } else {
        C64::new((-w).ln(), branch_arg)
    };
    Ok((e * log).exp())
}

fn solve_2x2(m: [[C64; 2]; 2], rhs: [C64; 2], at: f64) -> Result<[C64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let n1 = (m[0][0].norm() + m[0][1].norm()).max(m[1][0].norm() + m[1][1].norm());
    let inv_n1 = (m[1][1].norm() + m[0][1].norm()).max(m[1][0].norm() + m[0][0].norm()) / det.norm();
    let condition = n1 * inv_n1;
    if !(condition.is_finite() && condition <= MATCHING_CONDITION_LIMIT) {
        return Err(Error::MatchingSingular { at, condition });
    }
    Ok([
        (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det,
        (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det,
    ])
}

/// Connection constants `(α, β)` of `y_II = α u + β t^{c-a-b} ũ` from
/// value and derivative continuity at `x = 1/2` (`dt/dx = -1`).
pub fn match_ii(locals: &LocalSolutionSet, p: &HypParams) -> Result<(C64, C64)> {
    let y_i = locals.get(Form::Hypergeom);
    let u = locals.get(Form::T);
    let ut = locals.get(Form::TTilde);
    let kappa = p.kappa();
    let t = 0.5;
    let tk = real_power(t, kappa, 0.0)?;
    let (u0, u1) = (u.y.eval(t), u.derivative_at(t));
    let (w0, w1) = (ut.y.eval(t), ut.derivative_at(t));
    let m = [[u0, tk * w0], [-u1, -(kappa * tk / t * w0 + tk * w1)]];
    let rhs = [y_i.y.eval(0.5), y_i.derivative_at(0.5)];
    let [alpha, beta] = solve_2x2(m, rhs, 0.5)?;
    Ok((alpha, beta))
}

/// Connection constants `(γ, δ)` of `y_III = γ s^a v + δ s^b ṽ` from
/// continuity at `x = -1/2`, where `s = 1` and `ds/dx = 1`.
pub fn match_iii(locals: &LocalSolutionSet, p: &HypParams) -> Result<(C64, C64)> {
    let y_i = locals.get(Form::Hypergeom);
    let v = locals.get(Form::S);
    let vt = locals.get(Form::STilde);
    let s = 1.0;
    let (v0, v1) = (v.y.eval(s), v.derivative_at(s));
    let (w0, w1) = (vt.y.eval(s), vt.derivative_at(s));
    let m = [[v0, w0], [p.a * v0 + v1, p.b * w0 + w1]];
    let rhs = [y_i.y.eval(-0.5), y_i.derivative_at(-0.5)];
    let [gamma, delta] = solve_2x2(m, rhs, -0.5)?;
    Ok((gamma, delta))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionConstants {
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub delta: C64,
}

/// Which real-line domain a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealDomain {
    I,
    II,
    III,
}

impl RealDomain {
    /// `x = ±1/2` belong to I, `x = 3/2` to II, `±∞` to III.
    pub fn of(x: f64) -> RealDomain {
        if x.abs() <= 0.5 {
            RealDomain::I
        } else if x > 0.5 && x <= 1.5 {
            RealDomain::II
        } else {
            RealDomain::III
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RealDomain::I => "I",
            RealDomain::II => "II",
            RealDomain::III => "III",
        }
    }
}

/// `F(a, b, c; x)` assembled from the local solutions on the real line.
#[derive(Debug, Clone)]
pub struct HypRepresentation {
    pub params: HypParams,
    pub locals: LocalSolutionSet,
    pub constants: ConnectionConstants,
    pub genericness: GenericnessReport,
    pub options: RealOptions,
}

impl HypRepresentation {
    pub fn build(params: &HypParams, opts: &RealOptions) -> Result<Self> {
        let genericness = genericness_check(params, opts.epsilon).into_result()?;
        for w in &genericness.warnings {
            log::warn!("near-degenerate parameters: {w}");
        }
        let params = params.normalized();
        let locals = solve_locals(&params, opts)?;
        let (alpha, beta) = match_ii(&locals, &params)?;
        let (gamma, delta) = match_iii(&locals, &params)?;
        Ok(HypRepresentation {
            params,
            locals,
            constants: ConnectionConstants {
                alpha,
                beta,
                gamma,
                delta,
            },
            genericness,
            options: *opts,
        })
    }

    pub fn eval_real(&self, x: f64) -> Result<C64> {
        Ok(self.eval_real_jet(x)?[0])
    }

    /// `(F, F', F'')` at `x` (derivatives in `x`); `x = ±∞` is allowed for
    /// the value only, where the derivatives are returned as zero.
    pub fn eval_real_jet(&self, x: f64) -> Result<[C64; 3]> {
        if x.is_nan() {
            return Err(Error::InvalidArgument("x is NaN".into()));
        }
        self.eval_real_jet_in(x, RealDomain::of(x))
    }

    /// As [`eval_real_jet`](Self::eval_real_jet) through a given domain's
    /// representation. Valid wherever that domain's local solutions were
    /// computed, which includes the closure of the domain.
    pub fn eval_real_jet_in(&self, x: f64, domain: RealDomain) -> Result<[C64; 3]> {
        let ConnectionConstants {
            alpha,
            beta,
            gamma,
            delta,
        } = self.constants;
        let p = &self.params;
        match domain {
            RealDomain::I => {
                let mut jet = self.locals.get(Form::Hypergeom).jet(x);
                // F(0) = 1 by normalisation, not only to rounding
                if x == 0.0 {
                    jet[0] = ONE;
                }
                Ok(jet)
            }
            RealDomain::II => {
                let t = 1.0 - x;
                let kappa = p.kappa();
                if t.abs() < self.options.guard && kappa.re <= 0.0 && beta != ZERO {
                    return Err(Error::NearSingularity(format!("x = {x} is within the guard radius of x = 1")));
                }
                let [u0, u1, u2] = self.locals.get(Form::T).jet(t);
                // principal branch of t^κ; for x > 1 this is the lower edge of the cut
                let g = prefactored_jet(self.locals.get(Form::TTilde).jet(t), t, kappa, std::f64::consts::PI, beta)?;
                let h = [alpha * u0 + g[0], alpha * u1 + g[1], alpha * u2 + g[2]];
                Ok([h[0], -h[1], h[2]])
            }
            RealDomain::III => {
                let s = if x.is_infinite() { 0.0 } else { -1.0 / (x - 0.5) };
                // real negative s (x > 3/2) is taken on the lower edge of
                // its cut, which continues domain II's branch across x = 3/2
                let branch = -std::f64::consts::PI;
                let hv = prefactored_jet(self.locals.get(Form::S).jet(s), s, p.a, branch, gamma)?;
                let hw = prefactored_jet(self.locals.get(Form::STilde).jet(s), s, p.b, branch, delta)?;
                let h = [hv[0] + hw[0], hv[1] + hw[1], hv[2] + hw[2]];
                if s == 0.0 {
                    return Ok([h[0], ZERO, ZERO]);
                }
                let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
                Ok([h[0], h[1] * s2, h[1] * (2.0 * s3) + h[2] * s4])
            }
        }
    }

    /// `F'(x)`.
    pub fn eval_real_derivative(&self, x: f64) -> Result<C64> {
        Ok(self.eval_real_jet(x)?[1])
    }

    pub fn n_used(&self) -> [usize; 5] {
        self.locals.n_used()
    }
}

/// Jet of `k · w^e · f(w)` given the jet of `f`. A zero `k` short-circuits,
/// so an unused singular term never raises an error.
fn prefactored_jet(f: [C64; 3], w: f64, e: C64, branch_arg: f64, k: C64) -> Result<[C64; 3]> {
    if k == ZERO {
        return Ok([ZERO; 3]);
    }
    let we = real_power(w, e, branch_arg)?;
    if w == 0.0 {
        return Ok([k * we * f[0], ZERO, ZERO]);
    }
    let d1 = e * we / w;
    let d2 = e * (e - 1.0) * we / (w * w);
    Ok([
        k * we * f[0],
        k * (d1 * f[0] + we * f[1]),
        k * (d2 * f[0] + d1 * f[1] * 2.0 + we * f[2]),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_example() -> HypRepresentation {
        let p = HypParams::real(-1.0 / 3.0, 0.5, 0.5).unwrap();
        HypRepresentation::build(&p, &RealOptions::default()).unwrap()
    }

    fn closed_form(x: f64) -> C64 {
        C64::new(1.0 - x, 0.0).powf(1.0 / 3.0)
    }

    #[test]
    fn form_coefficients() {
        let p = HypParams::real(-1.0 / 3.0, 0.5, 0.5).unwrap();
        assert_eq!(kummer_ode(&p, Form::TTilde).r[0], ZERO);
        assert!((kummer_ode(&p, Form::T).q[0].re - 2.0 / 3.0).abs() < 1e-15);
        assert!((kummer_ode(&p, Form::S).r[0].re - 1.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn test_example_locals_and_constants() {
        let rep = test_example();
        let ut = &rep.locals.get(Form::TTilde).y;
        assert_eq!(ut.len(), 1);
        assert!((ut.coeffs()[0] - ONE).norm() < 1e-15);
        let v = &rep.locals.get(Form::S).y;
        assert!((v.eval(1.0).re - 1.5f64.powf(1.0 / 3.0)).abs() < 1e-14);
        let k = rep.constants;
        assert!(k.alpha.norm() < 1e-13, "{k:?}");
        assert!((k.beta - ONE).norm() < 1e-13, "{k:?}");
        assert!((k.gamma - ONE).norm() < 1e-13, "{k:?}");
        assert!(k.delta.norm() < 1e-13, "{k:?}");
    }

    #[test]
    fn test_example_identity_on_the_line() {
        let rep = test_example();
        for i in 0..=400 {
            let x = -10.0 + 0.05 * i as f64;
            if (x - 1.0).abs() < 0.05 {
                continue;
            }
            let f = rep.eval_real(x).unwrap();
            let e = closed_form(x);
            assert!((f - e).norm() <= 1e-12 * e.norm().max(1.0), "x={x} F={f} expected {e}");
        }
    }

    #[test]
    fn values_at_special_points() {
        let rep = test_example();
        assert!((rep.eval_real(0.0).unwrap() - ONE).norm() < 1e-15);
        assert!((rep.eval_real(1.0).unwrap()).norm() < 1e-15);
        // (1 - x)^{1/3} grows without bound; the representation reports the
        // analytic value at s = 0 only when it is finite
        assert!(rep.eval_real(f64::INFINITY).is_err());
    }

    #[test]
    fn table_row_at_one_half() {
        let p = HypParams::real(-0.1, 0.2, 0.3).unwrap();
        let rep = HypRepresentation::build(&p, &RealOptions::default()).unwrap();
        let f = rep.eval_real(0.5).unwrap();
        assert!((f.re - 0.956434210968).abs() < 1e-11);
        let f = rep.eval_real(1.5).unwrap();
        assert!((f - C64::new(0.904380753154, 0.179031615937)).norm() < 1e-11, "{f}");
        let f = rep.eval_real(100.0).unwrap();
        assert!((f - C64::new(1.36462877185, 0.400217146561)).norm() < 1e-10, "{f}");
    }

    #[test]
    fn degenerate_parameters_rejected() {
        let p = HypParams::real(1.0, 1.0, 2.0).unwrap();
        let err = HypRepresentation::build(&p, &RealOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn real_power_branches() {
        let e = C64::new(1.0 / 3.0, 0.0);
        let up = real_power(-8.0, e, std::f64::consts::PI).unwrap();
        let down = real_power(-8.0, e, -std::f64::consts::PI).unwrap();
        assert!((up - C64::new(1.0, 3f64.sqrt())).norm() < 1e-14);
        assert!((down - C64::new(1.0, -(3f64.sqrt()))).norm() < 1e-14);
        assert_eq!(real_power(0.0, e, 0.0).unwrap(), ZERO);
        assert_eq!(real_power(0.0, ZERO, 0.0).unwrap(), ONE);
        assert!(real_power(0.0, -e, 0.0).is_err());
    }
}
