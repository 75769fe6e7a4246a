//! The ultraspherical method for second-order linear ODEs with functional
//! constraints, and a Chebyshev collocation discretization kept for
//! conditioning comparisons.

use nalgebra::DMatrix;

use crate::cheb::{chebyshev_points, ChebSeries, Endpoint, Interval, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::linalg;
use crate::operators::{conversion_operator, diff_operator, mult_operator_c, mult_operator_t, t_to_c2, BandedOperator, Conversion};

/// Smallest truncation tried by [`solve_adaptive`].
pub const ADAPTIVE_START: usize = 16;

/// Number of trailing coefficients inspected by the adaptive stopping rule.
const TAIL_LEN: usize = 5;

/// Relative size below which trailing coefficients are dropped from an
/// adaptively computed series.
const KEEP_TOL: f64 = 1e-20;

/// Backward error above which a computed solution is rejected.
const RESIDUAL_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    PointValue,
    EndpointValue,
}

/// `y(ℓ₀) = target`, with `ℓ₀` on the unit interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub location: f64,
    pub target: C64,
}

impl Constraint {
    pub fn value_at(location: f64, target: C64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&location) {
            return Err(Error::InvalidArgument(format!(
                "constraint location {location} outside [-1, 1]"
            )));
        }
        Ok(Constraint {
            kind: ConstraintKind::PointValue,
            location,
            target,
        })
    }

    pub fn endpoint(end: Endpoint, target: C64) -> Self {
        Constraint {
            kind: ConstraintKind::EndpointValue,
            location: end.unit_location(),
            target,
        }
    }

    /// The functional as a row `T_j(ℓ₀)`, `j < n`.
    pub fn row(&self, n: usize) -> Vec<C64> {
        let l = self.location;
        let mut row = Vec::with_capacity(n);
        let (mut t0, mut t1) = (1.0, l);
        for j in 0..n {
            match j {
                0 => row.push(ONE),
                1 => row.push(C64::new(l, 0.0)),
                _ => {
                    let t2 = 2.0 * l * t1 - t0;
                    t0 = t1;
                    t1 = t2;
                    row.push(C64::new(t2, 0.0));
                }
            }
        }
        row
    }
}

/// `a₂(ℓ) y'' + a₁(ℓ) y' + a₀(ℓ) y = f(ℓ)` on the unit interval, with
/// derivatives taken in `ℓ`. `interval` records the physical interval the
/// solution lives on.
#[derive(Debug, Clone)]
pub struct OdeSpec {
    pub a2: ChebSeries,
    pub a1: ChebSeries,
    pub a0: ChebSeries,
    pub forcing: Option<ChebSeries>,
    pub interval: Interval,
    pub constraints: Vec<Constraint>,
}

impl OdeSpec {
    pub fn new(
        a2: ChebSeries,
        a1: ChebSeries,
        a0: ChebSeries,
        interval: Interval,
        constraints: Vec<Constraint>,
    ) -> Result<Self> {
        if a2.is_empty() || a1.is_empty() || a0.is_empty() {
            return Err(Error::InvalidArgument("ODE coefficient series must be nonempty".into()));
        }
        if constraints.is_empty() || constraints.len() > 2 {
            return Err(Error::InvalidArgument(format!(
                "a second-order problem takes one or two constraints, got {}",
                constraints.len()
            )));
        }
        Ok(OdeSpec {
            a2,
            a1,
            a0,
            forcing: None,
            interval,
            constraints,
        })
    }

    /// Build from monomial coefficients (lowest degree first) of
    /// `p(x) y'' + q(x) y' + r(x) y = 0` in the physical variable.
    pub fn from_monomials(
        p: &[C64],
        q: &[C64],
        r: &[C64],
        interval: Interval,
        constraints: Vec<Constraint>,
    ) -> Result<Self> {
        let h = interval.half_width();
        let map = |m: &[C64], scale: f64| -> Result<ChebSeries> {
            let n = m.len().max(1);
            let s = ChebSeries::from_fn(|x| horner(m, C64::new(x, 0.0)) * scale, n, interval)?;
            Ok(s.chopped(0.0).with_interval(Interval::UNIT))
        };
        Self::new(map(p, 1.0 / (h * h))?, map(q, 1.0 / h)?, map(r, 1.0)?, interval, constraints)
    }

    /// Build from coefficient functions of the physical variable, sampled at
    /// `samples` Chebyshev points and chopped at `chop`.
    pub fn from_fns<P, Q, R>(
        p: P,
        q: Q,
        r: R,
        interval: Interval,
        constraints: Vec<Constraint>,
        samples: usize,
        chop: f64,
    ) -> Result<Self>
    where
        P: Fn(f64) -> C64,
        Q: Fn(f64) -> C64,
        R: Fn(f64) -> C64,
    {
        let h = interval.half_width();
        let a2 = ChebSeries::from_fn(|x| p(x) / (h * h), samples, interval)?;
        let a1 = ChebSeries::from_fn(|x| q(x) / h, samples, interval)?;
        let a0 = ChebSeries::from_fn(r, samples, interval)?;
        let unit = |s: ChebSeries| s.chopped(chop).with_interval(Interval::UNIT);
        Self::new(unit(a2), unit(a1), unit(a0), interval, constraints)
    }

    /// Add a right-hand side given in `ℓ`.
    pub fn with_forcing(mut self, f: ChebSeries) -> Self {
        self.forcing = Some(f);
        self
    }

    fn coefficient_bandwidth(&self) -> usize {
        let f = self.forcing.as_ref().map_or(0, ChebSeries::len);
        self.a2.len().max(self.a1.len()).max(self.a0.len()).max(f)
    }

    /// Pointwise ODE residual of a candidate solution at `ℓ`.
    pub fn residual_at(&self, y: &ChebSeries, l: f64) -> C64 {
        let h = y.interval().half_width();
        let d1 = y.derivative();
        let d2 = d1.derivative();
        let x = y.interval().from_unit(l);
        let lhs = self.a2.eval_unit(l) * d2.eval(x) * (h * h) + self.a1.eval_unit(l) * d1.eval(x) * h + self.a0.eval_unit(l) * y.eval(x);
        lhs - self.forcing.as_ref().map_or(ZERO, |f| f.eval_unit(l))
    }
}

fn horner(m: &[C64], x: C64) -> C64 {
    m.iter().rev().fold(ZERO, |acc, c| acc * x + c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    /// Coefficients kept after chopping the converged solution.
    pub n_used: usize,
    /// Size of the linear system that produced it.
    pub n_system: usize,
    /// Largest of the trailing coefficients, relative to the largest one.
    pub tail_magnitude: f64,
    /// Backward error `‖A x − b‖ / (‖A‖‖x‖ + ‖b‖)`.
    pub residual: f64,
    pub condition_estimate: Option<f64>,
}

/// `𝓛 = M₂[a₂]𝒟₂ + 𝒮₁M₁[a₁]𝒟₁ + 𝒮₁𝒮₀M₀[a₀]` at size `size × size`.
fn differential_operator(spec: &OdeSpec, size: usize) -> Result<BandedOperator> {
    let d2 = diff_operator(2, size)?;
    let d1 = diff_operator(1, size)?;
    let s1 = conversion_operator(Conversion::C1ToC2, size);
    let s0 = conversion_operator(Conversion::TToC1, size);
    let second = mult_operator_c(2, &spec.a2, size)?.matmul(&d2);
    let first = s1.matmul(&mult_operator_c(1, &spec.a1, size)?.matmul(&d1));
    let zeroth = s1.matmul(&s0.matmul(&mult_operator_t(&spec.a0, size)));
    Ok(second.add(&first).add(&zeroth))
}

/// Assemble the `n × n` system: constraint rows on top of
/// `𝒫_{n−k} 𝓛 𝒫ₙᵀ`, right-hand side `(targets, 𝒮₁𝒮₀ f)`.
pub fn assemble(spec: &OdeSpec, n: usize) -> Result<(BandedOperator, Vec<C64>)> {
    let k = spec.constraints.len();
    if n < 3 || n <= k {
        return Err(Error::InvalidArgument(format!(
            "truncation n = {n} too small for {k} constraints"
        )));
    }
    let size = n + 2 * spec.coefficient_bandwidth() + 8;
    let l = differential_operator(spec, size)?.truncated(n - k, n);
    let (lo, up) = l.effective_bandwidths();
    let mut op = BandedOperator::zeros(n, n, lo + k, up.saturating_sub(k));
    for i in 0..n - k {
        for j in l.row_range(i) {
            let v = l.get(i, j);
            if v != ZERO {
                op.set(i + k, j, v);
            }
        }
    }
    let mut rhs = vec![ZERO; n];
    for (i, c) in spec.constraints.iter().enumerate() {
        op.set_dense_row(i, c.row(n));
        rhs[i] = c.target;
    }
    if let Some(f) = &spec.forcing {
        let mut fc = f.coeffs().to_vec();
        fc.resize(size, ZERO);
        let converted = t_to_c2(size).apply(&fc);
        rhs[k..].copy_from_slice(&converted[..n - k]);
    }
    Ok((op, rhs))
}

/// Solve at a fixed truncation `n`.
pub fn solve(spec: &OdeSpec, n: usize) -> Result<(ChebSeries, SolveReport)> {
    let (op, rhs) = assemble(spec, n)?;
    let x = linalg::solve_almost_banded(&op, &rhs).map_err(|e| match e {
        Error::Singular { .. } => Error::Singular {
            condition: linalg::condition_estimate(&op.to_dense()),
        },
        other => other,
    })?;
    let residual = linalg::relative_residual(&op, &x, &rhs);
    if residual.is_nan() || residual > RESIDUAL_LIMIT {
        return Err(Error::Singular {
            condition: linalg::condition_estimate(&op.to_dense()),
        });
    }
    let series = ChebSeries::new(x, spec.interval)?;
    let report = SolveReport {
        n_used: n,
        n_system: n,
        tail_magnitude: tail_magnitude(series.coeffs()),
        residual,
        condition_estimate: None,
    };
    Ok((series, report))
}

/// [`solve`] plus the 1-norm condition number of the system matrix.
pub fn solve_with_condition(spec: &OdeSpec, n: usize) -> Result<(ChebSeries, SolveReport)> {
    let (series, mut report) = solve(spec, n)?;
    let (op, _) = assemble(spec, n)?;
    report.condition_estimate = Some(linalg::condition_estimate(&op.to_dense()));
    Ok((series, report))
}

fn tail_magnitude(c: &[C64]) -> f64 {
    let max = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let start = c.len().saturating_sub(TAIL_LEN);
    c[start..].iter().map(|v| v.norm()).fold(0.0, f64::max) / max
}

/// Double `n` from 16 until the last five coefficients fall below
/// `tol · max |y_j|`.
///
/// `SolveReport::n_used` is the number of coefficients left after chopping
/// at `tol`. The series itself is only stripped of coefficients below
/// `1e-20 · max |y_j|`.
pub fn solve_adaptive(spec: &OdeSpec, tol: f64, n_max: usize) -> Result<(ChebSeries, SolveReport)> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let mut n = ADAPTIVE_START.min(n_max.max(3));
    loop {
        let (series, mut report) = solve(spec, n)?;
        if report.tail_magnitude <= tol {
            // n_used counts the coefficients needed for `tol`; the returned
            // series keeps more, because dropping a tail of size tol costs up
            // to n² tol in derivatives.
            report.n_used = series.chopped(tol).len();
            log::debug!("adaptive solve converged: n = {n}, needed {}", report.n_used);
            return Ok((series.chopped(KEEP_TOL), report));
        }
        if n >= n_max {
            return Err(Error::NotConverged {
                n,
                tail: report.tail_magnitude,
                tol,
            });
        }
        n = (2 * n).min(n_max);
    }
}

/// Chebyshev differentiation matrix on the `n` second-kind points.
pub fn cheb_diff_matrix(n: usize) -> DMatrix<f64> {
    let x = chebyshev_points(n);
    let mut d = DMatrix::zeros(n, n);
    if n < 2 {
        return d;
    }
    let c = |i: usize| {
        let s = if i % 2 == 0 { 1.0 } else { -1.0 };
        if i == 0 || i == n - 1 {
            2.0 * s
        } else {
            s
        }
    };
    for i in 0..n {
        let mut sum = 0.0;
        for j in 0..n {
            if i != j {
                let v = c(i) / c(j) / (x[i] - x[j]);
                d[(i, j)] = v;
                sum += v;
            }
        }
        d[(i, i)] = -sum;
    }
    d
}

/// Barycentric interpolation row for the value at `l` from the values at
/// the `n` second-kind points.
fn interpolation_row(l: f64, x: &[f64]) -> Vec<C64> {
    let n = x.len();
    if let Some(hit) = x.iter().position(|&xi| xi == l) {
        let mut row = vec![ZERO; n];
        row[hit] = ONE;
        return row;
    }
    let w: Vec<f64> = (0..n)
        .map(|j| {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n - 1 {
                0.5 * s
            } else {
                s
            }
        })
        .enumerate()
        .map(|(j, s)| s / (l - x[j]))
        .collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|v| C64::new(v / total, 0.0)).collect()
}

/// Collocation discretization at the `n` second-kind Chebyshev points, with
/// the rows nearest each constraint location replaced by the constraint.
pub fn collocation_matrix(spec: &OdeSpec, n: usize) -> Result<(DMatrix<C64>, Vec<C64>)> {
    if n < 3 || n <= spec.constraints.len() {
        return Err(Error::InvalidArgument(format!("collocation needs n >= 3, got {n}")));
    }
    let x = chebyshev_points(n);
    let d = cheb_diff_matrix(n).map(|v| C64::new(v, 0.0));
    let d2 = &d * &d;
    let mut m = DMatrix::from_element(n, n, ZERO);
    let mut rhs = vec![ZERO; n];
    for i in 0..n {
        let (a2, a1, a0) = (spec.a2.eval_unit(x[i]), spec.a1.eval_unit(x[i]), spec.a0.eval_unit(x[i]));
        for j in 0..n {
            m[(i, j)] = a2 * d2[(i, j)] + a1 * d[(i, j)];
        }
        m[(i, i)] += a0;
        rhs[i] = spec.forcing.as_ref().map_or(ZERO, |f| f.eval_unit(x[i]));
    }
    let mut used = vec![false; n];
    for c in &spec.constraints {
        let row = (0..n)
            .filter(|&i| !used[i])
            .min_by(|&i, &j| (x[i] - c.location).abs().total_cmp(&(x[j] - c.location).abs()))
            .expect("more points than constraints");
        used[row] = true;
        for (j, v) in interpolation_row(c.location, &x).into_iter().enumerate() {
            m[(row, j)] = v;
        }
        rhs[row] = c.target;
    }
    Ok((m, rhs))
}

/// Solve the collocation system; returns the values at the grid points.
pub fn solve_collocation(spec: &OdeSpec, n: usize) -> Result<Vec<C64>> {
    let (m, rhs) = collocation_matrix(spec, n)?;
    linalg::solve_dense(&m, &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn hypergeom_spec(a: f64, b: f64, cc: f64, interval: Interval) -> OdeSpec {
        OdeSpec::from_monomials(
            &[ZERO, ONE, -ONE],
            &[c(cc), c(-(1.0 + a + b))],
            &[c(-a * b)],
            interval,
            vec![Constraint::value_at(interval.to_unit(0.0), ONE).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn test_example_domain_one() {
        let spec = hypergeom_spec(-1.0 / 3.0, 0.5, 0.5, Interval::symmetric(0.5).unwrap());
        let (y, report) = solve(&spec, 30).unwrap();
        let expected = 0.5f64.powf(1.0 / 3.0);
        assert!((y.eval(0.5) - c(expected)).norm() < 1e-13);
        assert!((y.eval(-0.5) - c(1.5f64.powf(1.0 / 3.0))).norm() < 1e-13);
        assert!(report.residual < 1e-14);
        // the constraint row is met to rounding
        assert!((y.eval(0.0) - ONE).norm() < 1e-14);
    }

    #[test]
    fn linear_solution() {
        let spec = OdeSpec::new(
            ChebSeries::unit(vec![ONE]).unwrap(),
            ChebSeries::unit(vec![ZERO]).unwrap(),
            ChebSeries::unit(vec![ZERO]).unwrap(),
            Interval::UNIT,
            vec![Constraint::endpoint(Endpoint::Left, ZERO), Constraint::endpoint(Endpoint::Right, c(2.0))],
        )
        .unwrap();
        let (y, _) = solve(&spec, 10).unwrap();
        let co = y.coeffs();
        assert!((co[0] - ONE).norm() < 1e-15 && (co[1] - ONE).norm() < 1e-15);
        assert!(co[2..].iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn exponential_solution() {
        let e = std::f64::consts::E;
        let spec = OdeSpec::new(
            ChebSeries::unit(vec![ONE]).unwrap(),
            ChebSeries::unit(vec![ZERO]).unwrap(),
            ChebSeries::unit(vec![-ONE]).unwrap(),
            Interval::UNIT,
            vec![Constraint::value_at(0.0, ONE).unwrap(), Constraint::endpoint(Endpoint::Right, c(e))],
        )
        .unwrap();
        let (y, _) = solve(&spec, 30).unwrap();
        assert!((y.eval(-1.0) - c(1.0 / e)).norm() < 1e-14);
    }

    #[test]
    fn manufactured_forcing() {
        // y = sin(3ℓ), y'' + ℓ y' + (1 + ℓ²) y = f
        let q = ChebSeries::unit(vec![ZERO, ONE]).unwrap();
        let r = ChebSeries::unit(vec![c(1.5), ZERO, c(0.5)]).unwrap();
        let f = ChebSeries::from_fn(
            |l| {
                let y = (3.0 * l).sin();
                c(-9.0 * y + l * 3.0 * (3.0 * l).cos() + (1.0 + l * l) * y)
            },
            60,
            Interval::UNIT,
        )
        .unwrap()
        .chopped(1e-17);
        let spec = OdeSpec::new(
            ChebSeries::unit(vec![ONE]).unwrap(),
            q,
            r,
            Interval::UNIT,
            vec![
                Constraint::endpoint(Endpoint::Left, c((-3.0f64).sin())),
                Constraint::endpoint(Endpoint::Right, c(3.0f64.sin())),
            ],
        )
        .unwrap()
        .with_forcing(f);
        let (y, _) = solve(&spec, 50).unwrap();
        for i in 0..=100 {
            let l = -1.0 + 0.02 * i as f64;
            assert!((y.eval(l) - c((3.0 * l).sin())).norm() < 1e-12);
        }
    }

    #[test]
    fn adaptive_converges_quickly() {
        let spec = hypergeom_spec(-1.0 / 3.0, 0.5, 0.5, Interval::symmetric(0.5).unwrap());
        let (y, report) = solve_adaptive(&spec, 1e-15, 512).unwrap();
        assert!(report.n_used <= 40, "{report:?}");
        assert!(y.len() >= report.n_used && y.len() <= report.n_system);
        assert!((y.eval(0.5) - c(0.5f64.powf(1.0 / 3.0))).norm() < 1e-14);
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        // exp(40ℓ) needs far more than 32 coefficients
        let spec = OdeSpec::new(
            ChebSeries::unit(vec![ONE]).unwrap(),
            ChebSeries::unit(vec![ZERO]).unwrap(),
            ChebSeries::unit(vec![c(-1600.0)]).unwrap(),
            Interval::UNIT,
            vec![Constraint::endpoint(Endpoint::Left, ONE), Constraint::endpoint(Endpoint::Right, ONE)],
        )
        .unwrap();
        assert!(matches!(solve_adaptive(&spec, 1e-15, 32), Err(Error::NotConverged { n: 32, .. })));
    }

    #[test]
    fn collocation_linear_solution() {
        let spec = OdeSpec::new(
            ChebSeries::unit(vec![ONE]).unwrap(),
            ChebSeries::unit(vec![ZERO]).unwrap(),
            ChebSeries::unit(vec![ZERO]).unwrap(),
            Interval::UNIT,
            vec![Constraint::endpoint(Endpoint::Left, ZERO), Constraint::endpoint(Endpoint::Right, c(2.0))],
        )
        .unwrap();
        let vals = solve_collocation(&spec, 8).unwrap();
        for (v, x) in vals.iter().zip(chebyshev_points(8)) {
            assert!((v - c(1.0 + x)).norm() < 1e-13);
        }
    }

    #[test]
    fn constraint_row_values() {
        let row = Constraint::value_at(0.0, ONE).unwrap().row(6);
        let expect = [1.0, 0.0, -1.0, 0.0, 1.0, 0.0];
        for (r, e) in row.iter().zip(expect) {
            assert!((r.re - e).abs() < 1e-15);
        }
        assert!(Constraint::value_at(1.5, ONE).is_err());
    }
}
