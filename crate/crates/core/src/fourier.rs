//! Fourier series on `[-π, π)` and the Fourier coefficient-space spectral
//! method for periodic second-order ODEs.

use std::f64::consts::PI;

use nalgebra::DVector;
use rustfft::FftPlanner;

use crate::cheb::{C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::operators::BandedOperator;

/// `Σ_k c_k e^{ikφ}` for `k = k_min, …, k_min + len - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    coeffs: Vec<C64>,
    k_min: i64,
}

impl FourierSeries {
    pub fn new(coeffs: Vec<C64>, k_min: i64) -> Result<Self> {
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("Fourier coefficients"));
        }
        Ok(FourierSeries { coeffs, k_min })
    }

    /// Coefficients for `k = -K, …, K` (`coeffs.len() == 2K + 1`).
    pub fn symmetric(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::InvalidArgument("symmetric Fourier series needs an odd length".into()));
        }
        let k = (coeffs.len() / 2) as i64;
        Self::new(coeffs, -k)
    }

    /// Single mode `e^{ikφ}`.
    pub fn mode(k: i64) -> Self {
        FourierSeries {
            coeffs: vec![ONE],
            k_min: k,
        }
    }

    /// Sample `f` at `m` equispaced points and transform.
    pub fn from_fn<F: Fn(f64) -> C64>(f: F, m: usize) -> Self {
        let values: Vec<C64> = equispaced_angles(m).into_iter().map(f).collect();
        fourier_transform(&values)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.coeffs.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `e^{ikφ}` (zero outside the stored range).
    pub fn get(&self, k: i64) -> C64 {
        let idx = k - self.k_min;
        if idx < 0 {
            return ZERO;
        }
        self.coeffs.get(idx as usize).copied().unwrap_or(ZERO)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, phi: f64) -> C64 {
        // Horner in e^{iφ}, then shift by e^{i k_min φ}
        let w = C64::from_polar(1.0, phi);
        let acc = self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * w + c);
        acc * C64::from_polar(1.0, self.k_min as f64 * phi)
    }

    /// Drop modes at both ends with `|c_k| <= tol · max |c|`.
    pub fn trimmed(&self, tol: f64) -> FourierSeries {
        let cutoff = tol * self.max_abs();
        let first = self.coeffs.iter().position(|c| c.norm() > cutoff);
        let last = self.coeffs.iter().rposition(|c| c.norm() > cutoff);
        match (first, last) {
            (Some(f), Some(l)) => FourierSeries {
                coeffs: self.coeffs[f..=l].to_vec(),
                k_min: self.k_min + f as i64,
            },
            _ => FourierSeries {
                coeffs: vec![ZERO],
                k_min: 0,
            },
        }
    }
}

/// `φ_j = -π + 2πj/m`, `j = 0..m`.
pub fn equispaced_angles(m: usize) -> Vec<f64> {
    (0..m).map(|j| -PI + 2.0 * PI * j as f64 / m as f64).collect()
}

/// Coefficients from values at [`equispaced_angles`]. Odd `m = 2K + 1`
/// gives `k = -K, …, K`; even `m` gives `k = -m/2, …, m/2 - 1`.
pub fn fourier_transform(values: &[C64]) -> FourierSeries {
    let m = values.len();
    if m == 0 {
        return FourierSeries {
            coeffs: Vec::new(),
            k_min: 0,
        };
    }
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let k_min = -((m / 2) as i64);
    let scale = 1.0 / m as f64;
    let coeffs = (0..m as i64)
        .map(|idx| {
            let k = k_min + idx;
            // sampling starts at φ = -π, hence the (-1)^k
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            buf[k.rem_euclid(m as i64) as usize] * (scale * sign)
        })
        .collect();
    FourierSeries { coeffs, k_min }
}

/// Values at `m` equispaced angles; modes outside the resolvable range
/// alias.
pub fn inverse_fourier_transform(s: &FourierSeries, m: usize) -> Vec<C64> {
    let mut buf = vec![ZERO; m];
    if m == 0 {
        return buf;
    }
    for (idx, c) in s.coeffs.iter().enumerate() {
        let k = s.k_min + idx as i64;
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        buf[k.rem_euclid(m as i64) as usize] += c * sign;
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    buf
}

/// `𝒯[a]` acting on coefficients `k = -K, …, K`: entry `(j, k) = a_{j-k}`.
pub fn toeplitz_mult(a: &FourierSeries, big_k: usize) -> BandedOperator {
    let size = 2 * big_k + 1;
    let band = a.k_min().unsigned_abs().max(a.k_max().unsigned_abs()) as usize;
    let band = band.min(size.saturating_sub(1));
    let mut op = BandedOperator::zeros(size, size, band, band);
    for row in 0..size {
        for col in op.row_range(row) {
            let v = a.get(row as i64 - col as i64);
            if v != ZERO {
                op.set(row, col, v);
            }
        }
    }
    op
}

/// Diagonal `𝒟₁ = i·diag(k)` or `𝒟₂ = 𝒟₁²` on `k = -K, …, K`.
pub fn fourier_diff(order: usize, big_k: usize) -> Result<BandedOperator> {
    let ks = -(big_k as i64)..=(big_k as i64);
    let values: Vec<C64> = match order {
        1 => ks.map(|k| C64::new(0.0, k as f64)).collect(),
        2 => ks.map(|k| C64::new(-((k * k) as f64), 0.0)).collect(),
        other => {
            return Err(Error::InvalidArgument(format!(
                "differentiation order must be 1 or 2, got {other}"
            )))
        }
    };
    Ok(BandedOperator::diagonal(&values))
}

/// The `(2K+1) × (2K+1)` periodic system: top row `(-1)^k` (the value at
/// `φ = ±π`), then rows `k = -K, …, K-1` of
/// `𝒯[a₂]𝒟₂ + 𝒯[a₁]𝒟₁ + 𝒯[a₀]`.
pub fn periodic_system(
    a2: &FourierSeries,
    a1: &FourierSeries,
    a0: &FourierSeries,
    value: C64,
    big_k: usize,
) -> Result<(BandedOperator, Vec<C64>)> {
    let size = 2 * big_k + 1;
    let l = toeplitz_mult(a2, big_k)
        .matmul(&fourier_diff(2, big_k)?)
        .add(&toeplitz_mult(a1, big_k).matmul(&fourier_diff(1, big_k)?))
        .add(&toeplitz_mult(a0, big_k));
    let mut op = BandedOperator::zeros(size, size, l.lower() + 1, l.upper().saturating_sub(1));
    for row in 0..size - 1 {
        for col in l.row_range(row) {
            let v = l.get(row, col);
            if v != ZERO {
                op.set(row + 1, col, v);
            }
        }
    }
    let top = (0..size)
        .map(|idx| {
            let k = idx as i64 - big_k as i64;
            C64::new(if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 }, 0.0)
        })
        .collect();
    op.set_dense_row(0, top);
    let mut rhs = vec![ZERO; size];
    rhs[0] = value;
    Ok((op, rhs))
}

/// Solve `a₂ y'' + a₁ y' + a₀ y = 0` for a periodic `y` with `y(±π) = value`,
/// keeping modes `-K, …, K`.
pub fn solve_periodic(
    a2: &FourierSeries,
    a1: &FourierSeries,
    a0: &FourierSeries,
    value: C64,
    big_k: usize,
) -> Result<FourierSeries> {
    let (op, rhs) = periodic_system(a2, a1, a0, value, big_k)?;
    // The system's condition number grows exponentially with K, so the
    // pivot-ratio rejection in the shared solvers would refuse usable
    // answers; partial-pivoted LU is still backward stable here.
    let y = op
        .to_dense()
        .lu()
        .solve(&DVector::from_column_slice(&rhs))
        .ok_or(Error::Singular {
            condition: f64::INFINITY,
        })?;
    let y: Vec<C64> = y.iter().copied().collect();
    FourierSeries::symmetric(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn transforms_of_simple_functions() {
        let one = FourierSeries::from_fn(|_| ONE, 9);
        assert!((one.get(0) - ONE).norm() < 1e-15);
        assert!(one.coeffs().iter().map(|v| v.norm()).sum::<f64>() - 1.0 < 1e-14);
        let cos = FourierSeries::from_fn(|p| c(p.cos(), 0.0), 9);
        assert!((cos.get(1) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((cos.get(-1) - c(0.5, 0.0)).norm() < 1e-15);
        assert!(cos.get(0).norm() < 1e-15);
        let e2 = FourierSeries::from_fn(|p| C64::from_polar(1.0, 2.0 * p), 8);
        assert!((e2.get(2) - ONE).norm() < 1e-15);
        assert_eq!((e2.k_min(), e2.k_max()), (-4, 3));
    }

    #[test]
    fn round_trip_and_eval() {
        let s = FourierSeries::new(vec![c(0.5, 1.0), c(-1.0, 0.0), c(0.25, -0.5), c(2.0, 0.0)], -2).unwrap();
        let vals = inverse_fourier_transform(&s, 11);
        for (v, phi) in vals.iter().zip(equispaced_angles(11)) {
            assert!((v - s.eval(phi)).norm() < 1e-14);
        }
        let back = fourier_transform(&vals);
        for k in -5..=5 {
            assert!((back.get(k) - s.get(k)).norm() < 1e-15);
        }
    }

    #[test]
    fn toeplitz_examples() {
        let id = toeplitz_mult(&FourierSeries::mode(0), 3);
        assert_eq!(id.to_dense(), BandedOperator::identity(7).to_dense());
        // e^{iφ} shifts up by one index: c_k = y_{k-1}
        let shift = toeplitz_mult(&FourierSeries::mode(1), 3);
        let mut e0 = vec![ZERO; 7];
        e0[3] = ONE;
        let out = shift.apply(&e0);
        assert_eq!(out[4], ONE);
        let two_cos = FourierSeries::new(vec![ONE, ZERO, ONE], -1).unwrap();
        let out = toeplitz_mult(&two_cos, 3).apply(&e0);
        assert_eq!((out[2], out[3], out[4]), (ONE, ZERO, ONE));
    }

    #[test]
    fn diff_examples() {
        let d1 = fourier_diff(1, 2).unwrap();
        assert_eq!(d1.get(3, 3), c(0.0, 1.0));
        assert_eq!(d1.get(2, 2), ZERO);
        let d2 = fourier_diff(2, 2).unwrap();
        assert_eq!(d2.get(4, 4), c(-4.0, 0.0));
        assert!(fourier_diff(3, 2).is_err());
    }

    #[test]
    fn periodic_solve_recovers_exp_cos() {
        // 3y'' - 2 sin φ y' + (2 cos φ - 1) y = 0 has the periodic solution 2 + cos φ
        let a2 = FourierSeries::new(vec![c(3.0, 0.0)], 0).unwrap();
        let a1 = FourierSeries::symmetric(vec![c(0.0, -1.0), ZERO, c(0.0, 1.0)]).unwrap();
        let a0 = FourierSeries::symmetric(vec![ONE, c(-1.0, 0.0), ONE]).unwrap();
        for big_k in [2usize, 4, 8] {
            let y = solve_periodic(&a2, &a1, &a0, ONE, big_k).unwrap();
            for i in 0..50 {
                let phi = -PI + 0.1257 * i as f64;
                assert!((y.eval(phi) - c(2.0 + phi.cos(), 0.0)).norm() < 1e-10, "K = {big_k}");
            }
        }
    }

    #[test]
    fn trimming_keeps_interior() {
        let s = FourierSeries::new(vec![c(1e-20, 0.0), ONE, c(1e-20, 0.0), c(0.5, 0.0), c(1e-19, 0.0)], -2).unwrap();
        let t = s.trimmed(1e-16);
        assert_eq!((t.k_min(), t.k_max()), (-1, 1));
    }
}
