//! Sparse coefficient-space operators of the ultraspherical method.
//!
//! All operators act on coefficient vectors indexed by degree from 0. They
//! are built at a finite size; products and conversions shift content
//! towards lower indices, so callers that need an exact `r × c` block of an
//! infinite operator construct it with some padding and truncate.

use nalgebra::DMatrix;

use crate::cheb::{ChebSeries, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Banded matrix with optional dense rows (the "almost banded" form).
///
/// Row `i` of the band stores columns `i - lower ..= i + upper`. A dense
/// row, when present, replaces the band row with the same index.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    rows: usize,
    cols: usize,
    lower: usize,
    upper: usize,
    band: Vec<C64>,
    dense_rows: Vec<(usize, Vec<C64>)>,
}

impl BandedOperator {
    pub fn zeros(rows: usize, cols: usize, lower: usize, upper: usize) -> Self {
        BandedOperator {
            rows,
            cols,
            lower,
            upper,
            band: vec![ZERO; rows * (lower + upper + 1)],
            dense_rows: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut op = Self::zeros(n, n, 0, 0);
        for i in 0..n {
            op.set(i, i, ONE);
        }
        op
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut op = Self::zeros(values.len(), values.len(), 0, 0);
        for (i, v) in values.iter().enumerate() {
            op.set(i, i, *v);
        }
        op
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    /// `max(lower, upper)`.
    pub fn bandwidth(&self) -> usize {
        self.lower.max(self.upper)
    }

    pub fn dense_rows(&self) -> &[(usize, Vec<C64>)] {
        &self.dense_rows
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.rows || j >= self.cols || j + self.lower < i || j > i + self.upper {
            return None;
        }
        Some(i * self.width() + (j + self.lower - i))
    }

    /// Column range of the band in row `i`.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        let lo = i.saturating_sub(self.lower);
        let hi = (i + self.upper + 1).min(self.cols);
        lo..hi.max(lo)
    }

    fn dense_row(&self, i: usize) -> Option<&Vec<C64>> {
        self.dense_rows
            .iter()
            .find(|(r, _)| *r == i)
            .map(|(_, row)| row)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if let Some(row) = self.dense_row(i) {
            return row.get(j).copied().unwrap_or(ZERO);
        }
        self.slot(i, j).map_or(ZERO, |s| self.band[s])
    }

    /// Set a band entry.
    ///
    /// # Panics
    /// If `(i, j)` lies outside the declared band.
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band [-{}, {}]", self.lower, self.upper));
        self.band[s] = v;
    }

    fn add_at(&mut self, i: usize, j: usize, v: C64) {
        if let Some(s) = self.slot(i, j) {
            self.band[s] += v;
        } else if v != ZERO {
            panic!("entry ({i}, {j}) outside band");
        }
    }

    /// Replace row `i` by a dense row of length `cols`.
    pub fn set_dense_row(&mut self, i: usize, row: Vec<C64>) {
        assert!(i < self.rows, "dense row index out of range");
        assert_eq!(row.len(), self.cols, "dense row length must equal column count");
        if let Some(slot) = self.dense_rows.iter_mut().find(|(r, _)| *r == i) {
            slot.1 = row;
        } else {
            self.dense_rows.push((i, row));
            self.dense_rows.sort_by_key(|(r, _)| *r);
        }
        let w = self.width();
        for v in &mut self.band[i * w..(i + 1) * w] {
            *v = ZERO;
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "dimension mismatch in apply");
        (0..self.rows)
            .map(|i| match self.dense_row(i) {
                Some(row) => row.iter().zip(x).fold(ZERO, |acc, (a, b)| acc + a * b),
                None => self
                    .row_range(i)
                    .fold(ZERO, |acc, j| acc + self.band[self.slot(i, j).unwrap()] * x[j]),
            })
            .collect()
    }

    /// Product `self · rhs` of two band operators.
    ///
    /// # Panics
    /// If `rhs` carries dense rows or the inner dimensions disagree.
    pub fn matmul(&self, rhs: &BandedOperator) -> BandedOperator {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        assert!(rhs.dense_rows.is_empty(), "right factor must be purely banded");
        let mut out = BandedOperator::zeros(
            self.rows,
            rhs.cols,
            self.lower + rhs.lower,
            self.upper + rhs.upper,
        );
        for i in 0..self.rows {
            if self.dense_row(i).is_some() {
                continue;
            }
            for k in self.row_range(i) {
                let a = self.band[self.slot(i, k).unwrap()];
                if a == ZERO {
                    continue;
                }
                for j in rhs.row_range(k) {
                    out.add_at(i, j, a * rhs.band[rhs.slot(k, j).unwrap()]);
                }
            }
        }
        for (i, row) in &self.dense_rows {
            let dense: Vec<C64> = (0..rhs.cols)
                .map(|j| (0..self.cols).fold(ZERO, |acc, k| acc + row[k] * rhs.get(k, j)))
                .collect();
            out.set_dense_row(*i, dense);
        }
        out
    }

    /// `self + rhs`; both must be purely banded with equal shape.
    pub fn add(&self, rhs: &BandedOperator) -> BandedOperator {
        self.axpby(ONE, rhs, ONE)
    }

    /// `alpha · self + beta · rhs`.
    pub fn axpby(&self, alpha: C64, rhs: &BandedOperator, beta: C64) -> BandedOperator {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        assert!(self.dense_rows.is_empty() && rhs.dense_rows.is_empty());
        let mut out = BandedOperator::zeros(
            self.rows,
            self.cols,
            self.lower.max(rhs.lower),
            self.upper.max(rhs.upper),
        );
        for op_scale in [(self, alpha), (rhs, beta)] {
            let (op, s) = op_scale;
            for i in 0..op.rows {
                for j in op.row_range(i) {
                    out.add_at(i, j, op.band[op.slot(i, j).unwrap()] * s);
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: C64) -> BandedOperator {
        let mut out = self.clone();
        for v in &mut out.band {
            *v *= s;
        }
        for (_, row) in &mut out.dense_rows {
            for v in row {
                *v *= s;
            }
        }
        out
    }

    /// Top-left `rows × cols` block.
    pub fn truncated(&self, rows: usize, cols: usize) -> BandedOperator {
        assert!(rows <= self.rows && cols <= self.cols, "truncation larger than operator");
        let mut out = BandedOperator::zeros(rows, cols, self.lower, self.upper);
        for i in 0..rows {
            for j in out.row_range(i) {
                out.set(i, j, self.get(i, j));
            }
        }
        for (i, row) in &self.dense_rows {
            if *i < rows {
                out.set_dense_row(*i, row[..cols].to_vec());
            }
        }
        out
    }

    /// Rows `start..start + count` as a new operator (band offsets shift with
    /// the rows, so the lower bandwidth grows by `start`).
    pub fn row_block(&self, start: usize, count: usize) -> BandedOperator {
        assert!(start + count <= self.rows);
        assert!(self.dense_rows.is_empty());
        let lower = self.lower + start;
        let upper = self.upper.saturating_sub(start);
        let mut out = BandedOperator::zeros(count, self.cols, lower, upper);
        for i in 0..count {
            for j in self.row_range(start + i) {
                out.add_at(i, j, self.get(start + i, j));
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    /// Largest `|j - i|` (split below/above) over the nonzero band entries.
    pub fn effective_bandwidths(&self) -> (usize, usize) {
        let mut lo = 0;
        let mut up = 0;
        for i in 0..self.rows {
            if self.dense_row(i).is_some() {
                continue;
            }
            for j in self.row_range(i) {
                if self.band[self.slot(i, j).unwrap()] != ZERO {
                    if j < i {
                        lo = lo.max(i - j);
                    } else {
                        up = up.max(j - i);
                    }
                }
            }
        }
        (lo, up)
    }
}

/// `𝒟₁` (Chebyshev to `C^{(1)}` coefficients of the derivative) or `𝒟₂`
/// (Chebyshev to `C^{(2)}` coefficients of the second derivative), `n × n`.
pub fn diff_operator(order: usize, n: usize) -> Result<BandedOperator> {
    if n == 0 {
        return Err(Error::InvalidArgument("operator size must be positive".into()));
    }
    match order {
        1 => {
            let mut d = BandedOperator::zeros(n, n, 0, 1);
            for j in 0..n.saturating_sub(1) {
                d.set(j, j + 1, C64::new((j + 1) as f64, 0.0));
            }
            Ok(d)
        }
        2 => {
            let mut d = BandedOperator::zeros(n, n, 0, 2);
            for j in 0..n.saturating_sub(2) {
                d.set(j, j + 2, C64::new(2.0 * (j + 2) as f64, 0.0));
            }
            Ok(d)
        }
        other => Err(Error::InvalidArgument(format!(
            "differentiation order must be 1 or 2, got {other}"
        ))),
    }
}

/// Basis conversions `𝒮₀: T → C^{(1)}` and `𝒮₁: C^{(1)} → C^{(2)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conversion {
    TToC1,
    C1ToC2,
}

pub fn conversion_operator(kind: Conversion, n: usize) -> BandedOperator {
    let mut s = BandedOperator::zeros(n, n, 0, 2);
    for j in 0..n {
        let (diag, sup) = match kind {
            Conversion::TToC1 => (if j == 0 { 1.0 } else { 0.5 }, -0.5),
            Conversion::C1ToC2 => (1.0 / (j as f64 + 1.0), -1.0 / (j as f64 + 3.0)),
        };
        s.set(j, j, C64::new(diag, 0.0));
        if j + 2 < n {
            s.set(j, j + 2, C64::new(sup, 0.0));
        }
    }
    s
}

/// `𝒮₁𝒮₀`, Chebyshev to `C^{(2)}`.
pub fn t_to_c2(n: usize) -> BandedOperator {
    conversion_operator(Conversion::C1ToC2, n).matmul(&conversion_operator(Conversion::TToC1, n))
}

/// `M₀[a]`: multiplication by `a(ℓ) = Σ a_j T_j(ℓ)` in the Chebyshev basis,
/// a Toeplitz plus an almost-Hankel operator.
pub fn mult_operator_t(a: &ChebSeries, n: usize) -> BandedOperator {
    let coeffs = a.coeffs();
    let m = coeffs.len().max(1);
    let bw = (m - 1).min(n.saturating_sub(1));
    let at = |k: usize| coeffs.get(k).copied().unwrap_or(ZERO);
    let mut op = BandedOperator::zeros(n, n, bw, bw);
    for i in 0..n {
        for j in op.row_range(i) {
            let toeplitz = if i == j { at(0) } else { at(i.abs_diff(j)) * 0.5 };
            let hankel = if i >= 1 { at(i + j) * 0.5 } else { ZERO };
            op.set(i, j, toeplitz + hankel);
        }
    }
    op
}

/// Multiplication by `ℓ` in the `C^{(λ)}` basis, from
/// `ℓ C_j = [(j+1) C_{j+1} + (j+2λ-1) C_{j-1}] / (2(j+λ))`.
pub fn jacobi_operator_c(lambda: f64, n: usize) -> BandedOperator {
    let mut x = BandedOperator::zeros(n, n, 1, 1);
    for j in 0..n {
        let jf = j as f64;
        let denom = 2.0 * (jf + lambda);
        if j + 1 < n {
            x.set(j + 1, j, C64::new((jf + 1.0) / denom, 0.0));
        }
        if j >= 1 {
            x.set(j - 1, j, C64::new((jf + 2.0 * lambda - 1.0) / denom, 0.0));
        }
    }
    x
}

/// Multiplication by `ℓ` in the Chebyshev basis.
pub fn jacobi_operator_t(n: usize) -> BandedOperator {
    let mut x = BandedOperator::zeros(n, n, 1, 1);
    for j in 0..n {
        if j + 1 < n {
            x.set(j + 1, j, C64::new(if j == 0 { 1.0 } else { 0.5 }, 0.0));
        }
        if j >= 1 {
            x.set(j - 1, j, C64::new(0.5, 0.0));
        }
    }
    x
}

/// `Σ a_k T_k(X)` by Clenshaw's recurrence on operators. `X` must be large
/// enough that its truncation does not reach the requested block; the
/// result is cut to `n × n`.
fn chebyshev_of_operator(a: &ChebSeries, x: &BandedOperator, n: usize) -> BandedOperator {
    let size = x.rows();
    let coeffs = a.coeffs();
    let id = BandedOperator::identity(size);
    let two_x = x.scaled(C64::new(2.0, 0.0));
    let result = match coeffs.len() {
        0 => BandedOperator::zeros(size, size, 0, 0),
        1 => id.scaled(coeffs[0]),
        len => {
            let mut b1 = BandedOperator::zeros(size, size, 0, 0);
            let mut b2 = BandedOperator::zeros(size, size, 0, 0);
            for k in (1..len).rev() {
                let b0 = id
                    .scaled(coeffs[k])
                    .add(&two_x.matmul(&b1))
                    .axpby(ONE, &b2, -ONE);
                b2 = b1;
                b1 = b0;
            }
            id.scaled(coeffs[0])
                .add(&x.matmul(&b1))
                .axpby(ONE, &b2, -ONE)
        }
    };
    let bw = coeffs.len().saturating_sub(1);
    shrink(&result.truncated(n, n), bw)
}

fn shrink(op: &BandedOperator, bw: usize) -> BandedOperator {
    let lower = bw.min(op.lower());
    let upper = bw.min(op.upper());
    let mut out = BandedOperator::zeros(op.rows(), op.cols(), lower, upper);
    for i in 0..op.rows() {
        for j in out.row_range(i) {
            out.set(i, j, op.get(i, j));
        }
    }
    out
}

/// `M_λ[a]`: multiplication by `a(ℓ)` (given by Chebyshev coefficients)
/// acting on `C^{(λ)}` coefficients, `λ ∈ {1, 2}`.
pub fn mult_operator_c(lambda: usize, a: &ChebSeries, n: usize) -> Result<BandedOperator> {
    if !(lambda == 1 || lambda == 2) {
        return Err(Error::InvalidArgument(format!(
            "multiplication operator order must be 1 or 2, got {lambda}"
        )));
    }
    let pad = a.len() + 2;
    let x = jacobi_operator_c(lambda as f64, n + pad);
    Ok(chebyshev_of_operator(a, &x, n))
}

/// `M₀[a]` built by the same operator recurrence as [`mult_operator_c`];
/// used to cross-check the explicit Toeplitz-plus-Hankel formula.
pub fn mult_operator_t_by_recurrence(a: &ChebSeries, n: usize) -> BandedOperator {
    let pad = a.len() + 2;
    let x = jacobi_operator_t(n + pad);
    chebyshev_of_operator(a, &x, n)
}
