//! Harmonic continuation of boundary data into an ellipse or disk.
//!
//! The field is `u(r, φ) = Σ_k u_k(r) e^{ikφ}` with `u_k(r) = Σ_j X_{j,k}
//! T_j(r)`, `r ∈ [-1, 1]`, in the elliptic polar coordinates of
//! [`Ellipse`]. The Laplacian couples mode `k` to `k ± 2` with a strength
//! proportional to `1/A² - 1/B²`, so on a disk every mode decouples. Since
//! `u_k` has the parity of `k`, only `X_{j,k}` with `j + k` even are stored as
//! unknowns.

use nalgebra::{DMatrix, DVector};

use crate::cheb::{ChebSeries, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::geometry::Ellipse;
use crate::linalg::{self, BlockTridiagonal};
use crate::operators::{conversion_operator, diff_operator, mult_operator_c, t_to_c2, BandedOperator, Conversion};

/// Coefficients `X_{j,k}` of a field on an ellipse or disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebFourierField {
    coeffs: DMatrix<C64>,
    k_min: i64,
    shape: Ellipse,
}

impl ChebFourierField {
    pub fn new(coeffs: DMatrix<C64>, k_min: i64, shape: Ellipse) -> Self {
        ChebFourierField { coeffs, k_min, shape }
    }

    /// `n × m` matrix; row `j` is the Chebyshev degree, column `c` the
    /// Fourier index `k_min + c`.
    pub fn coeffs(&self) -> &DMatrix<C64> {
        &self.coeffs
    }

    pub fn n(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn m(&self) -> usize {
        self.coeffs.ncols()
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.m() as i64 - 1
    }

    pub fn shape(&self) -> Ellipse {
        self.shape
    }

    /// `X_{j,k}`, zero outside the stored range.
    pub fn get(&self, j: usize, k: i64) -> C64 {
        let col = k - self.k_min;
        if j >= self.n() || col < 0 || col as usize >= self.m() {
            return ZERO;
        }
        self.coeffs[(j, col as usize)]
    }

    /// Radial profile `u_k` as a Chebyshev series on `[-1, 1]`.
    pub fn mode(&self, k: i64) -> ChebSeries {
        let coeffs = (0..self.n()).map(|j| self.get(j, k)).collect();
        ChebSeries::unit(coeffs).expect("stored coefficients are finite")
    }

    /// Fourier coefficients of the field on `r = 1`.
    pub fn boundary_series(&self) -> FourierSeries {
        let coeffs = (0..self.m()).map(|c| self.coeffs.column(c).sum()).collect();
        FourierSeries::new(coeffs, self.k_min).expect("stored coefficients are finite")
    }

    pub fn eval(&self, r: f64, phi: f64) -> C64 {
        let t = chebyshev_t(r, self.n());
        let w = C64::from_polar(1.0, phi);
        let mut acc = ZERO;
        // Horner in e^{iφ} over the columns
        for c in (0..self.m()).rev() {
            let col = self.coeffs.column(c);
            let uk: C64 = col.iter().zip(&t).map(|(x, tj)| x * tj).sum();
            acc = acc * w + uk;
        }
        acc * C64::from_polar(1.0, self.k_min as f64 * phi)
    }

    /// Evaluate at a point `w` of the local variable.
    pub fn eval_at(&self, w: C64) -> C64 {
        let (r, phi) = self.shape.coordinates(w);
        self.eval(r, phi)
    }

    /// Values on the tensor grid `rs × phis` (rows follow `rs`).
    pub fn eval_grid(&self, rs: &[f64], phis: &[f64]) -> DMatrix<C64> {
        let n = self.n();
        let t = DMatrix::from_fn(rs.len(), n, |i, j| C64::new(chebyshev_t(rs[i], n)[j], 0.0));
        let e = DMatrix::from_fn(self.m(), phis.len(), |c, p| {
            C64::from_polar(1.0, (self.k_min + c as i64) as f64 * phis[p])
        });
        t * &self.coeffs * e
    }
}

fn chebyshev_t(x: f64, n: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(n);
    for j in 0..n {
        t.push(match j {
            0 => 1.0,
            1 => x,
            _ => 2.0 * x * t[j - 1] - t[j - 2],
        });
    }
    t
}

/// `T₀ = 𝒮₁𝒮₀`, `T₁ = 𝒮₁M₁[r]𝒟₁` and `T₂ = M₂[r²]𝒟₂`: the `C^{(2)}`
/// coefficients of `u`, `r u'` and `r² u''`.
struct RadialOps {
    t0: BandedOperator,
    t1: BandedOperator,
    t2: BandedOperator,
}

impl RadialOps {
    fn new(n: usize) -> Result<Self> {
        let size = n + 8;
        let r = ChebSeries::unit(vec![ZERO, ONE])?;
        let r2 = ChebSeries::unit(vec![C64::new(0.5, 0.0), ZERO, C64::new(0.5, 0.0)])?;
        let t0 = t_to_c2(size);
        let t1 = conversion_operator(Conversion::C1ToC2, size)
            .matmul(&mult_operator_c(1, &r, size)?)
            .matmul(&diff_operator(1, size)?);
        let t2 = mult_operator_c(2, &r2, size)?.matmul(&diff_operator(2, size)?);
        Ok(RadialOps { t0, t1, t2 })
    }

    fn entry(&self, coef: [f64; 3], i: usize, j: usize) -> C64 {
        self.t2.get(i, j) * coef[0] + self.t1.get(i, j) * coef[1] + self.t0.get(i, j) * coef[2]
    }
}

/// Weights of `(T₂, T₁, T₀)` in the block coupling mode `col_k` into the
/// equation for mode `row_k`.
fn coupling(shape: Ellipse, row_k: i64, col_k: i64) -> [f64; 3] {
    let inv_a2 = 1.0 / (shape.a * shape.a);
    let inv_b2 = 1.0 / (shape.b * shape.b);
    let sum = inv_a2 + inv_b2;
    let diff = inv_a2 - inv_b2;
    let k = row_k as f64;
    match col_k - row_k {
        0 => [0.5 * sum, 0.5 * sum, -0.5 * sum * k * k],
        -2 => {
            let kk = k - 2.0;
            [0.25 * diff, -0.25 * diff * (1.0 + 2.0 * kk), 0.25 * diff * kk * k]
        }
        2 => {
            let kk = k + 2.0;
            [0.25 * diff, 0.25 * diff * (2.0 * kk - 1.0), 0.25 * diff * kk * k]
        }
        _ => [0.0; 3],
    }
}

/// Reduced `h × h` block for modes of parity `p`: row 0 is the boundary
/// row when `boundary` is set, rows `1..h` are equations `i = p, p+2, …`.
fn block(ops: &RadialOps, coef: [f64; 3], p: usize, h: usize, boundary: bool) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(h, h, ZERO);
    if boundary {
        m.row_mut(0).fill(ONE);
    }
    for q in 0..h - 1 {
        let i = p + 2 * q;
        for c in q..(q + 3).min(h) {
            m[(q + 1, c)] = ops.entry(coef, i, p + 2 * c);
        }
    }
    m
}

fn parity(k: i64) -> usize {
    k.rem_euclid(2) as usize
}

/// Solve Laplace's equation in `shape` with boundary values `boundary` on
/// `r = 1`, using `n` Chebyshev coefficients (rounded up to even) per mode.
pub fn laplace_solve(boundary: &FourierSeries, shape: Ellipse, n: usize) -> Result<ChebFourierField> {
    if boundary.is_empty() {
        return Err(Error::InvalidArgument("boundary data has no Fourier modes".into()));
    }
    let n = n.max(4).div_ceil(2) * 2;
    let h = n / 2;
    let ops = RadialOps::new(n)?;
    let k_min = boundary.k_min();
    let m = boundary.len();
    let mut x = DMatrix::from_element(n, m, ZERO);
    let mut store = |k: i64, reduced: &[C64]| {
        let p = parity(k);
        for (c, v) in reduced.iter().enumerate() {
            x[(p + 2 * c, (k - k_min) as usize)] = *v;
        }
    };

    if shape.is_disk() {
        for k in boundary.k_min()..=boundary.k_max() {
            let coef = coupling(shape, k, k);
            let p = parity(k);
            // row 0 of T is e₀ᵀ; the rank-one term turns it into the boundary row
            let mut diag = vec![ONE; h];
            let mut sub = vec![ZERO; h - 1];
            let mut sup = vec![ZERO; h - 1];
            for q in 0..h - 1 {
                let i = p + 2 * q;
                let row = q + 1;
                sub[row - 1] = ops.entry(coef, i, p + 2 * (row - 1));
                diag[row] = ops.entry(coef, i, p + 2 * row);
                if row + 1 < h {
                    sup[row] = ops.entry(coef, i, p + 2 * (row + 1));
                }
            }
            let mut w = vec![ONE; h];
            w[0] = ZERO;
            let mut rhs = vec![ZERO; h];
            rhs[0] = boundary.get(k);
            let u = linalg::solve_tridiagonal_rank_one(&sub, &diag, &sup, &w, &rhs)?;
            store(k, &u);
        }
    } else {
        for start in [k_min, k_min + 1] {
            let modes: Vec<i64> = (start..=boundary.k_max()).step_by(2).collect();
            if modes.is_empty() {
                continue;
            }
            let p = parity(start);
            let diag = modes.iter().map(|&k| block(&ops, coupling(shape, k, k), p, h, true)).collect();
            let lower = modes
                .iter()
                .map(|&k| block(&ops, coupling(shape, k, k - 2), p, h, false))
                .collect();
            let upper = modes
                .iter()
                .map(|&k| block(&ops, coupling(shape, k, k + 2), p, h, false))
                .collect();
            let rhs: Vec<DVector<C64>> = modes
                .iter()
                .map(|&k| {
                    let mut v = DVector::from_element(h, ZERO);
                    v[0] = boundary.get(k);
                    v
                })
                .collect();
            let sol = BlockTridiagonal { lower, diag, upper }.solve(&rhs)?;
            for (k, u) in modes.iter().zip(sol) {
                store(*k, u.as_slice());
            }
        }
    }
    if x.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite("Laplace solution"));
    }
    Ok(ChebFourierField::new(x, k_min, shape))
}

/// Double `n` from 32 until the last four Chebyshev rows are below
/// `tol · max |X|`.
pub fn laplace_solve_adaptive(
    boundary: &FourierSeries,
    shape: Ellipse,
    tol: f64,
    n_max: usize,
) -> Result<ChebFourierField> {
    let mut n = 32;
    loop {
        let field = laplace_solve(boundary, shape, n)?;
        let scale = field.coeffs.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let tail = field
            .coeffs
            .rows(n - 4, 4)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        if tail <= tol * scale || scale == 0.0 {
            return Ok(field);
        }
        if n * 2 > n_max {
            return Err(Error::NotConverged {
                n,
                tail: tail / scale,
                tol,
            });
        }
        n *= 2;
    }
}

/// Largest residual of the discretized Laplace equations (excluding the
/// boundary rows), relative to `max |X|`.
pub fn harmonic_residual(field: &ChebFourierField) -> Result<f64> {
    let n = field.n();
    let ops = RadialOps::new(n)?;
    let scale = field.coeffs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for k in field.k_min()..=field.k_max() {
        for i in 0..n.saturating_sub(2) {
            let mut acc = ZERO;
            for dk in [-2i64, 0, 2] {
                let coef = coupling(field.shape, k, k + dk);
                for j in i..(i + 5).min(n) {
                    acc += ops.entry(coef, i, j) * field.get(j, k + dk);
                }
            }
            worst = worst.max(acc.norm());
        }
    }
    Ok(worst / scale)
}
