//! Chebyshev and ultraspherical series on a real interval.
//!
//! A series stores its coefficients by degree together with the interval
//! `[lo, hi]`; evaluation first maps a point `x` to `ℓ ∈ [-1, 1]` through
//! `x = lo (1 - ℓ)/2 + hi (1 + ℓ)/2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const UNIT: Interval = Interval { lo: -1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::NonFinite("interval endpoint"));
        }
        if lo >= hi {
            return Err(Error::InvalidArgument(format!(
                "interval requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    /// `[-half, half]`.
    pub fn symmetric(half: f64) -> Result<Self> {
        Self::new(-half, half)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.hi + self.lo)
    }

    pub fn to_unit(&self, x: f64) -> f64 {
        (2.0 * x - self.lo - self.hi) / (self.hi - self.lo)
    }

    pub fn to_unit_complex(&self, x: C64) -> C64 {
        (x * 2.0 - (self.lo + self.hi)) / (self.hi - self.lo)
    }

    pub fn from_unit(&self, l: f64) -> f64 {
        self.lo * (1.0 - l) * 0.5 + self.hi * (1.0 + l) * 0.5
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Which end of the interval (`ℓ = -1` or `ℓ = +1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Left,
    Right,
}

impl Endpoint {
    pub fn unit_location(self) -> f64 {
        match self {
            Endpoint::Left => -1.0,
            Endpoint::Right => 1.0,
        }
    }
}

/// Truncated Chebyshev expansion `Σ c_j T_j(ℓ)` on an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    coeffs: Vec<C64>,
    interval: Interval,
}

impl ChebSeries {
    pub fn new(coeffs: Vec<C64>, interval: Interval) -> Result<Self> {
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("Chebyshev coefficients"));
        }
        Ok(ChebSeries { coeffs, interval })
    }

    /// Series on `[-1, 1]`.
    pub fn unit(coeffs: Vec<C64>) -> Result<Self> {
        Self::new(coeffs, Interval::UNIT)
    }

    pub fn from_real(coeffs: &[f64], interval: Interval) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect(), interval)
    }

    pub fn constant(value: C64, interval: Interval) -> Result<Self> {
        Self::new(vec![value], interval)
    }

    /// Interpolant through values at the second-kind points of `interval`,
    /// ordered as [`chebyshev_points`] (from `hi` down to `lo`).
    pub fn from_values(values: &[C64], interval: Interval) -> Result<Self> {
        Self::new(values_to_coeffs(values), interval)
    }

    /// Interpolate `f` at `n` Chebyshev points of `interval`.
    pub fn from_fn<F>(f: F, n: usize, interval: Interval) -> Result<Self>
    where
        F: Fn(f64) -> C64,
    {
        let values: Vec<C64> = chebyshev_points(n)
            .into_iter()
            .map(|l| f(interval.from_unit(l)))
            .collect();
        Self::from_values(&values, interval)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64) -> C64 {
        clenshaw(&self.coeffs, C64::new(self.interval.to_unit(x), 0.0))
    }

    /// Evaluate the polynomial at a complex point of the physical variable.
    pub fn eval_complex(&self, x: C64) -> C64 {
        clenshaw(&self.coeffs, self.interval.to_unit_complex(x))
    }

    pub fn eval_unit(&self, l: f64) -> C64 {
        clenshaw(&self.coeffs, C64::new(l, 0.0))
    }

    /// Values at the `n` Chebyshev points of the interval.
    pub fn values(&self, n: usize) -> Vec<C64> {
        chebyshev_points(n)
            .into_iter()
            .map(|l| self.eval_unit(l))
            .collect()
    }

    /// First derivative with respect to the physical variable at an end of
    /// the interval, using `T'_j(1) = j²` and `T'_j(-1) = (-1)^{j+1} j²`.
    pub fn endpoint_derivative(&self, end: Endpoint) -> C64 {
        let mut acc = ZERO;
        for (j, c) in self.coeffs.iter().enumerate() {
            let j2 = (j * j) as f64;
            let w = match end {
                Endpoint::Right => j2,
                Endpoint::Left if j % 2 == 1 => j2,
                Endpoint::Left => -j2,
            };
            acc += c * w;
        }
        acc / self.interval.half_width()
    }

    /// Derivative series with respect to the physical variable.
    pub fn derivative(&self) -> ChebSeries {
        let n = self.coeffs.len();
        if n <= 1 {
            return ChebSeries {
                coeffs: vec![ZERO],
                interval: self.interval,
            };
        }
        let mut d = vec![ZERO; n + 1];
        for k in (1..n).rev() {
            d[k - 1] = d[k + 1] + self.coeffs[k] * (2.0 * k as f64);
        }
        d[0] *= 0.5;
        d.truncate(n - 1);
        let scale = 1.0 / self.interval.half_width();
        ChebSeries {
            coeffs: d.into_iter().map(|c| c * scale).collect(),
            interval: self.interval,
        }
    }

    /// Drop trailing coefficients with `|c_j| <= tol * max |c|`, keeping at
    /// least one coefficient.
    pub fn chopped(&self, tol: f64) -> ChebSeries {
        let cutoff = tol * self.max_abs();
        let keep = self
            .coeffs
            .iter()
            .rposition(|c| c.norm() > cutoff)
            .map_or(1, |p| p + 1);
        ChebSeries {
            coeffs: self.coeffs[..keep.min(self.coeffs.len()).max(1)].to_vec(),
            interval: self.interval,
        }
    }

    /// Same polynomial described on a different interval is not expressible
    /// by relabelling; this only swaps the interval tag of a unit series.
    pub(crate) fn with_interval(mut self, interval: Interval) -> ChebSeries {
        self.interval = interval;
        self
    }
}

/// Clenshaw evaluation of `Σ c_j T_j(ℓ)`. An empty list sums to zero.
pub fn clenshaw(coeffs: &[C64], l: C64) -> C64 {
    match coeffs.len() {
        0 => ZERO,
        1 => coeffs[0],
        n => {
            let two_l = l * 2.0;
            let mut b1 = ZERO;
            let mut b2 = ZERO;
            for c in coeffs[1..n].iter().rev() {
                let b0 = c + two_l * b1 - b2;
                b2 = b1;
                b1 = b0;
            }
            coeffs[0] + l * b1 - b2
        }
    }
}

/// Real-argument Clenshaw for real coefficients.
pub fn clenshaw_real(coeffs: &[f64], l: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * l * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs.first().copied().unwrap_or(0.0) + l * b1 - b2
}

/// Second-kind Chebyshev points `cos(jπ/(n-1))`, `j = 0..n`, from `+1` down
/// to `-1`. A single point is placed at `ℓ = 1`.
pub fn chebyshev_points(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => {
            let m = (n - 1) as f64;
            (0..n)
                .map(|j| {
                    // sin form keeps the points exactly antisymmetric
                    let t = (m - 2.0 * j as f64) * PI / (2.0 * m);
                    t.sin()
                })
                .collect()
        }
    }
}

fn cos_table(big_n: usize) -> Vec<f64> {
    // cos(mπ/N) for m in 0..2N, symmetric by construction
    (0..2 * big_n)
        .map(|m| {
            let t = (big_n as f64 - 2.0 * (m % (2 * big_n)) as f64) * PI / (2.0 * big_n as f64);
            // cos(mπ/N) = sin(π/2 - mπ/N)
            t.sin()
        })
        .collect()
}

/// Coefficients of the interpolant through values at [`chebyshev_points`].
pub fn values_to_coeffs(values: &[C64]) -> Vec<C64> {
    let n = values.len();
    if n <= 1 {
        return values.to_vec();
    }
    let big_n = n - 1;
    let table = cos_table(big_n);
    let mut out = vec![ZERO; n];
    for (k, ck) in out.iter_mut().enumerate() {
        let mut acc = ZERO;
        for (j, v) in values.iter().enumerate() {
            let w = if j == 0 || j == big_n { 0.5 } else { 1.0 };
            acc += v * (w * table[(j * k) % (2 * big_n)]);
        }
        let scale = if k == 0 || k == big_n { 1.0 } else { 2.0 };
        *ck = acc * (scale / big_n as f64);
    }
    out
}

/// Values at [`chebyshev_points`] of the series with the given coefficients.
pub fn coeffs_to_values(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len();
    if n <= 1 {
        return coeffs.to_vec();
    }
    let big_n = n - 1;
    let table = cos_table(big_n);
    (0..n)
        .map(|j| {
            coeffs
                .iter()
                .enumerate()
                .fold(ZERO, |acc, (k, c)| acc + c * table[(j * k) % (2 * big_n)])
        })
        .collect()
}

/// Gegenbauer order `λ` of an ultraspherical basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UltraOrder {
    One,
    Two,
}

impl UltraOrder {
    pub fn lambda(self) -> f64 {
        match self {
            UltraOrder::One => 1.0,
            UltraOrder::Two => 2.0,
        }
    }

    pub fn from_lambda(lambda: usize) -> Result<Self> {
        match lambda {
            1 => Ok(UltraOrder::One),
            2 => Ok(UltraOrder::Two),
            other => Err(Error::InvalidArgument(format!(
                "ultraspherical order must be 1 or 2, got {other}"
            ))),
        }
    }
}

/// Truncated expansion `Σ c_j C_j^{(λ)}(ℓ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UltraSeries {
    coeffs: Vec<C64>,
    order: UltraOrder,
    interval: Interval,
}

impl UltraSeries {
    pub fn new(coeffs: Vec<C64>, order: UltraOrder, interval: Interval) -> Result<Self> {
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("ultraspherical coefficients"));
        }
        Ok(UltraSeries {
            coeffs,
            order,
            interval,
        })
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn order(&self) -> UltraOrder {
        self.order
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn eval(&self, x: f64) -> C64 {
        let l = self.interval.to_unit(x);
        let basis = gegenbauer_values(self.order.lambda(), l, self.coeffs.len());
        self.coeffs
            .iter()
            .zip(basis)
            .fold(ZERO, |acc, (c, p)| acc + c * p)
    }
}

/// `C_0^{(λ)}(ℓ), …, C_{n-1}^{(λ)}(ℓ)` by the three-term recurrence.
pub fn gegenbauer_values(lambda: f64, l: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(1.0);
    if n == 1 {
        return out;
    }
    out.push(2.0 * lambda * l);
    for j in 1..n - 1 {
        let jf = j as f64;
        let next = (2.0 * (jf + lambda) * l * out[j] - (jf + 2.0 * lambda - 1.0) * out[j - 1])
            / (jf + 1.0);
        out.push(next);
    }
    out
}
