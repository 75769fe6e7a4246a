//! Linear solvers for the almost-banded, block-tridiagonal and
//! tridiagonal-plus-rank-one systems produced by the spectral methods.

use nalgebra::{DMatrix, DVector};

use crate::cheb::{C64, ZERO};
use crate::error::{Error, Result};
use crate::operators::BandedOperator;

/// Systems up to this size are solved densely by Householder QR.
pub const DENSE_LIMIT: usize = 256;

/// Relative size below which a pivot is treated as zero.
const PIVOT_TOL: f64 = 1e-15;

pub fn norm1(m: &DMatrix<C64>) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn norm_inf_vec(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// 1-norm condition number `‖A‖₁ ‖A⁻¹‖₁`; `+∞` for a singular matrix.
pub fn condition_estimate(m: &DMatrix<C64>) -> f64 {
    assert!(m.is_square(), "condition number needs a square matrix");
    if m.nrows() == 0 {
        return 1.0;
    }
    match m.clone().lu().try_inverse() {
        Some(inv) => {
            let k = norm1(m) * norm1(&inv);
            if k.is_finite() {
                k
            } else {
                f64::INFINITY
            }
        }
        None => f64::INFINITY,
    }
}

/// 2-norm condition number `σ_max / σ_min` from the singular values.
pub fn condition_number_2(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let sv = m.clone().singular_values();
    let k = sv.max() / sv.min();
    if k.is_finite() {
        k
    } else {
        f64::INFINITY
    }
}

/// Solve a square dense system by Householder QR.
pub fn solve_dense(m: &DMatrix<C64>, rhs: &[C64]) -> Result<Vec<C64>> {
    assert!(m.is_square() && m.nrows() == rhs.len(), "dimension mismatch");
    let n = rhs.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let qr = m.clone().qr();
    let r = qr.r();
    let diag_max = (0..n).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    let diag_min = (0..n).map(|i| r[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    if diag_max == 0.0 || diag_min <= PIVOT_TOL * diag_max {
        return Err(Error::Singular {
            condition: condition_estimate(m),
        });
    }
    let b = DVector::from_column_slice(rhs);
    let x = qr.solve(&b).ok_or(Error::Singular {
        condition: f64::INFINITY,
    })?;
    if x.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Singular {
            condition: condition_estimate(m),
        });
    }
    Ok(x.iter().copied().collect())
}

/// LU factorization with partial pivoting of a square band matrix.
///
/// Row `r` is stored over columns `r - kl ..= r + kl + ku`, leaving room for
/// the fill produced by row interchanges.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<C64>,
    pivots: Vec<usize>,
}

impl BandLu {
    fn width(kl: usize, ku: usize) -> usize {
        2 * kl + ku + 1
    }

    fn idx(&self, r: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= r && j <= r + self.kl + self.ku);
        r * Self::width(self.kl, self.ku) + (j + self.kl - r)
    }

    /// Factor the operator's band (dense rows are not allowed here).
    pub fn factor(op: &BandedOperator) -> Result<BandLu> {
        assert_eq!(op.rows(), op.cols(), "band LU needs a square operator");
        assert!(op.dense_rows().is_empty(), "band LU cannot hold dense rows");
        let n = op.rows();
        let kl = op.lower();
        let ku = op.upper();
        let w = Self::width(kl, ku);
        let mut lu = BandLu {
            n,
            kl,
            ku,
            data: vec![ZERO; n * w],
            pivots: vec![0; n],
        };
        let mut scale = 0.0_f64;
        for i in 0..n {
            for j in op.row_range(i) {
                let v = op.get(i, j);
                scale = scale.max(v.norm());
                let k = lu.idx(i, j);
                lu.data[k] = v;
            }
        }
        if scale == 0.0 {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        for i in 0..n {
            let last_row = (i + kl + 1).min(n);
            let last_col = (i + kl + ku + 1).min(n);
            let mut p = i;
            let mut best = lu.data[lu.idx(i, i)].norm();
            for r in i + 1..last_row {
                let v = lu.data[lu.idx(r, i)].norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best <= PIVOT_TOL * scale {
                return Err(Error::Singular {
                    condition: f64::INFINITY,
                });
            }
            lu.pivots[i] = p;
            if p != i {
                for j in i..last_col {
                    let a = lu.idx(i, j);
                    let b = lu.idx(p, j);
                    lu.data.swap(a, b);
                }
            }
            let pivot = lu.data[lu.idx(i, i)];
            for r in i + 1..last_row {
                let ri = lu.idx(r, i);
                let l = lu.data[ri] / pivot;
                lu.data[ri] = l;
                if l == ZERO {
                    continue;
                }
                for j in i + 1..last_col {
                    let src = lu.data[lu.idx(i, j)];
                    let dst = lu.idx(r, j);
                    lu.data[dst] -= l * src;
                }
            }
        }
        Ok(lu)
    }

    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        assert_eq!(rhs.len(), self.n);
        let n = self.n;
        let mut x = rhs.to_vec();
        for i in 0..n {
            x.swap(i, self.pivots[i]);
            let xi = x[i];
            if xi == ZERO {
                continue;
            }
            let end = (i + self.kl + 1).min(n);
            for (r, xr) in x.iter_mut().enumerate().take(end).skip(i + 1) {
                *xr -= self.data[self.idx(r, i)] * xi;
            }
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            let end = (i + self.kl + self.ku + 1).min(n);
            for (j, xj) in x.iter().enumerate().take(end).skip(i + 1) {
                acc -= self.data[self.idx(i, j)] * xj;
            }
            x[i] = acc / self.data[self.idx(i, i)];
        }
        x
    }
}

/// Solve an almost-banded system whose dense rows are exactly the first
/// `k` rows.
///
/// Small systems go through dense QR. Larger ones are split into the
/// border (the first `k` unknowns) and the square band block of the
/// remaining rows and columns; the band block is factored by [`BandLu`]
/// and the `k × k` Schur complement is solved densely. If the band block is
/// singular or the residual is poor, the dense solver takes over.
pub fn solve_almost_banded(op: &BandedOperator, rhs: &[C64]) -> Result<Vec<C64>> {
    let n = op.rows();
    assert_eq!(n, op.cols(), "system must be square");
    assert_eq!(n, rhs.len(), "rhs length mismatch");
    if n <= DENSE_LIMIT {
        return solve_dense(&op.to_dense(), rhs);
    }
    match solve_bordered(op, rhs) {
        Some(x) if relative_residual(op, &x, rhs) <= 1e-12 => Ok(x),
        _ => solve_dense(&op.to_dense(), rhs),
    }
}

/// Bordered elimination without the dense fallback; `None` when the band
/// block cannot be factored.
pub fn solve_bordered(op: &BandedOperator, rhs: &[C64]) -> Option<Vec<C64>> {
    let n = op.rows();
    let k = op.dense_rows().len();
    if op
        .dense_rows()
        .iter()
        .enumerate()
        .any(|(pos, (row, _))| pos != *row)
    {
        return None;
    }
    if k == 0 {
        return BandLu::factor(op).ok().map(|lu| lu.solve(rhs));
    }
    if k >= n {
        return None;
    }
    let m = n - k;
    let mut band = BandedOperator::zeros(m, m, op.lower(), op.upper());
    for i in 0..m {
        for j in band.row_range(i) {
            band.set(i, j, op.get(k + i, k + j));
        }
    }
    let lu = BandLu::factor(&band).ok()?;
    let border_cols: Vec<Vec<C64>> = (0..k)
        .map(|c| (0..m).map(|i| op.get(k + i, c)).collect())
        .collect();
    let z: Vec<Vec<C64>> = border_cols.iter().map(|col| lu.solve(col)).collect();
    let w = lu.solve(&rhs[k..]);

    let dense = op.dense_rows();
    let mut schur = DMatrix::from_element(k, k, ZERO);
    let mut srhs = vec![ZERO; k];
    for (r, (_, row)) in dense.iter().enumerate() {
        for c in 0..k {
            let mut v = row[c];
            for i in 0..m {
                v -= row[k + i] * z[c][i];
            }
            schur[(r, c)] = v;
        }
        let mut v = rhs[r];
        for i in 0..m {
            v -= row[k + i] * w[i];
        }
        srhs[r] = v;
    }
    let xa = solve_dense(&schur, &srhs).ok()?;
    let mut x = xa.clone();
    for i in 0..m {
        let mut v = w[i];
        for c in 0..k {
            v -= z[c][i] * xa[c];
        }
        x.push(v);
    }
    Some(x)
}

/// `‖A x − b‖∞ / (‖A‖∞‖x‖∞ + ‖b‖∞)`, a backward-error measure.
pub fn relative_residual(op: &BandedOperator, x: &[C64], rhs: &[C64]) -> f64 {
    let ax = op.apply(x);
    let r: Vec<C64> = ax.iter().zip(rhs).map(|(a, b)| a - b).collect();
    let a_norm = (0..op.rows())
        .map(|i| (0..op.cols()).map(|j| op.get(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let denom = a_norm * norm_inf_vec(x) + norm_inf_vec(rhs);
    if denom == 0.0 {
        0.0
    } else {
        norm_inf_vec(&r) / denom
    }
}

/// Block-tridiagonal system: block row `i` reads
/// `lower[i] x_{i-1} + diag[i] x_i + upper[i] x_{i+1} = rhs[i]`
/// (`lower[0]` and `upper[last]` are ignored).
#[derive(Debug, Clone)]
pub struct BlockTridiagonal {
    pub lower: Vec<DMatrix<C64>>,
    pub diag: Vec<DMatrix<C64>>,
    pub upper: Vec<DMatrix<C64>>,
}

impl BlockTridiagonal {
    /// Block LU without pivoting across blocks; each Schur-complemented
    /// diagonal block is factored with partial pivoting.
    pub fn solve(&self, rhs: &[DVector<C64>]) -> Result<Vec<DVector<C64>>> {
        let nb = self.diag.len();
        assert_eq!(rhs.len(), nb);
        if nb == 0 {
            return Ok(Vec::new());
        }
        let mut lus = Vec::with_capacity(nb);
        let mut g: Vec<DVector<C64>> = Vec::with_capacity(nb);
        // carries D'^{-1} U for the previous block
        let mut prev_dinv_u: Option<DMatrix<C64>> = None;
        for i in 0..nb {
            let mut d = self.diag[i].clone();
            let mut r = rhs[i].clone();
            if i > 0 {
                let l = &self.lower[i];
                if let Some(ref du) = prev_dinv_u {
                    d -= l * du;
                }
                r -= l * &g[i - 1];
            }
            let lu = d.clone().lu();
            let scale = d.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let u = lu.u();
            let pmin = (0..d.nrows()).map(|j| u[(j, j)].norm()).fold(f64::INFINITY, f64::min);
            if scale == 0.0 || pmin <= PIVOT_TOL * scale {
                return Err(Error::Singular {
                    condition: condition_estimate(&d),
                });
            }
            let gi = lu.solve(&r).ok_or(Error::Singular {
                condition: f64::INFINITY,
            })?;
            prev_dinv_u = if i + 1 < nb {
                Some(lu.solve(&self.upper[i]).ok_or(Error::Singular {
                    condition: f64::INFINITY,
                })?)
            } else {
                None
            };
            g.push(gi);
            lus.push(prev_dinv_u.clone());
        }
        let mut x = g;
        for i in (0..nb - 1).rev() {
            let du = lus[i].as_ref().expect("coupling stored for all but the last block");
            let next = x[i + 1].clone();
            x[i] -= du * next;
        }
        Ok(x)
    }
}

/// Solve a tridiagonal system with partial pivoting (`sub[i]` couples row
/// `i + 1` to column `i`, `sup[i]` couples row `i` to column `i + 1`).
pub fn solve_tridiagonal(sub: &[C64], diag: &[C64], sup: &[C64], rhs: &[C64]) -> Result<Vec<C64>> {
    let n = diag.len();
    assert!(sub.len() + 1 == n.max(1) && sup.len() + 1 == n.max(1) && rhs.len() == n);
    if n == 0 {
        return Ok(Vec::new());
    }
    // rows hold (diag, first super, second super) after elimination
    let mut d = diag.to_vec();
    let mut u1: Vec<C64> = sup.to_vec();
    u1.push(ZERO);
    let mut u2 = vec![ZERO; n];
    let mut l = sub.to_vec();
    let mut b = rhs.to_vec();
    let scale = diag
        .iter()
        .chain(sub)
        .chain(sup)
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    for i in 0..n - 1 {
        if l[i].norm() > d[i].norm() {
            // swap rows i and i + 1
            let (ri_d, ri_u1, ri_u2, ri_b) = (d[i], u1[i], u2[i], b[i]);
            d[i] = l[i];
            u1[i] = d[i + 1];
            u2[i] = u1[i + 1];
            b[i] = b[i + 1];
            l[i] = ri_d;
            d[i + 1] = ri_u1;
            u1[i + 1] = ri_u2;
            b[i + 1] = ri_b;
        }
        if d[i].norm() <= PIVOT_TOL * scale {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        let f = l[i] / d[i];
        d[i + 1] -= f * u1[i];
        if i + 1 < n - 1 {
            u1[i + 1] -= f * u2[i];
        }
        let bi = b[i];
        b[i + 1] -= f * bi;
    }
    if d[n - 1].norm() <= PIVOT_TOL * scale {
        return Err(Error::Singular {
            condition: f64::INFINITY,
        });
    }
    let mut x = vec![ZERO; n];
    for i in (0..n).rev() {
        let mut v = b[i];
        if i + 1 < n {
            v -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            v -= u2[i] * x[i + 2];
        }
        x[i] = v / d[i];
    }
    Ok(x)
}

/// Solve `(T + e₀ wᵀ) x = b` for tridiagonal `T` via Sherman–Morrison.
pub fn solve_tridiagonal_rank_one(
    sub: &[C64],
    diag: &[C64],
    sup: &[C64],
    w: &[C64],
    rhs: &[C64],
) -> Result<Vec<C64>> {
    let n = diag.len();
    let y = solve_tridiagonal(sub, diag, sup, rhs)?;
    let mut e0 = vec![ZERO; n];
    if n > 0 {
        e0[0] = C64::new(1.0, 0.0);
    }
    let z = solve_tridiagonal(sub, diag, sup, &e0)?;
    let wy: C64 = w.iter().zip(&y).map(|(a, b)| a * b).sum();
    let wz: C64 = w.iter().zip(&z).map(|(a, b)| a * b).sum();
    let denom = C64::new(1.0, 0.0) + wz;
    if denom.norm() <= 1e-14 * (1.0 + wz.norm()) {
        return Err(Error::Singular {
            condition: f64::INFINITY,
        });
    }
    let f = wy / denom;
    Ok(y.iter().zip(&z).map(|(yi, zi)| yi - zi * f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pseudo_random(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    }

    fn random_almost_banded(n: usize, k: usize, kl: usize, ku: usize, seed: u64) -> BandedOperator {
        let mut s = seed;
        let mut op = BandedOperator::zeros(n, n, kl, ku);
        for i in 0..n {
            for j in op.row_range(i) {
                let mut v = c(pseudo_random(&mut s), pseudo_random(&mut s));
                if i == j {
                    v += c(4.0, 0.0);
                }
                op.set(i, j, v);
            }
        }
        for r in 0..k {
            let row = (0..n).map(|_| c(pseudo_random(&mut s), pseudo_random(&mut s))).collect();
            op.set_dense_row(r, row);
        }
        op
    }

    #[test]
    fn condition_of_simple_matrices() {
        let id = DMatrix::<C64>::identity(4, 4);
        assert!((condition_estimate(&id) - 1.0).abs() < 1e-15);
        let mut d = DMatrix::<C64>::identity(2, 2);
        d[(1, 1)] = c(1e-8, 0.0);
        assert!((condition_estimate(&d) / 1e8 - 1.0).abs() < 1e-12);
        let z = DMatrix::<C64>::zeros(3, 3);
        assert!(condition_estimate(&z).is_infinite());
    }

    #[test]
    fn band_lu_matches_dense() {
        let op = random_almost_banded(40, 0, 3, 5, 7);
        let rhs: Vec<C64> = (0..40).map(|i| c(i as f64, 1.0)).collect();
        let x_band = BandLu::factor(&op).unwrap().solve(&rhs);
        let x_dense = solve_dense(&op.to_dense(), &rhs).unwrap();
        for (a, b) in x_band.iter().zip(&x_dense) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn band_lu_pivots_through_zero_diagonal() {
        // band with a zero leading diagonal entry forces an interchange
        let mut op = BandedOperator::zeros(3, 3, 1, 1);
        op.set(0, 0, ZERO);
        op.set(0, 1, c(1.0, 0.0));
        op.set(1, 0, c(1.0, 0.0));
        op.set(1, 1, c(1.0, 0.0));
        op.set(1, 2, c(2.0, 0.0));
        op.set(2, 1, c(3.0, 0.0));
        op.set(2, 2, c(1.0, 0.0));
        let rhs = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        let x = BandLu::factor(&op).unwrap().solve(&rhs);
        let r = op.apply(&x);
        for (a, b) in r.iter().zip(&rhs) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn bordered_solver_matches_dense() {
        for k in [1, 2] {
            let op = random_almost_banded(300, k, 4, 6, 11 + k as u64);
            let rhs: Vec<C64> = (0..300).map(|i| c((i as f64).sin(), 0.5)).collect();
            let x = solve_bordered(&op, &rhs).unwrap();
            let xd = solve_dense(&op.to_dense(), &rhs).unwrap();
            let err = x.iter().zip(&xd).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-11, "k={k} err={err}");
            assert!(relative_residual(&op, &x, &rhs) < 1e-14);
        }
    }

    #[test]
    fn dense_solver_flags_singular() {
        let mut m = DMatrix::<C64>::identity(3, 3);
        m[(2, 2)] = ZERO;
        assert!(matches!(
            solve_dense(&m, &[ZERO, ZERO, c(1.0, 0.0)]),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn tridiagonal_with_pivoting() {
        let sub = vec![c(1.0, 0.0), c(4.0, 0.0), c(1.0, 0.0)];
        let diag = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(2.0, 0.0)];
        let sup = vec![c(2.0, 0.0), c(1.0, 1.0), c(3.0, 0.0)];
        let rhs = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        let x = solve_tridiagonal(&sub, &diag, &sup, &rhs).unwrap();
        let mut m = DMatrix::<C64>::zeros(4, 4);
        for i in 0..4 {
            m[(i, i)] = diag[i];
            if i < 3 {
                m[(i + 1, i)] = sub[i];
                m[(i, i + 1)] = sup[i];
            }
        }
        let xd = solve_dense(&m, &rhs).unwrap();
        for (a, b) in x.iter().zip(&xd) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn sherman_morrison_matches_dense() {
        let n = 12;
        let sub: Vec<C64> = (0..n - 1).map(|i| c(0.3 * i as f64, 0.1)).collect();
        let diag: Vec<C64> = (0..n).map(|i| c(2.0 + i as f64, 0.0)).collect();
        let sup: Vec<C64> = (0..n - 1).map(|i| c(-0.5, 0.01 * i as f64)).collect();
        let w: Vec<C64> = (0..n).map(|i| c(1.0, -(i as f64) * 0.1)).collect();
        let rhs: Vec<C64> = (0..n).map(|i| c(1.0 / (i + 1) as f64, 0.0)).collect();
        let x = solve_tridiagonal_rank_one(&sub, &diag, &sup, &w, &rhs).unwrap();
        let mut m = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag[i];
            if i + 1 < n {
                m[(i + 1, i)] = sub[i];
                m[(i, i + 1)] = sup[i];
            }
            m[(0, i)] += w[i];
        }
        let xd = solve_dense(&m, &rhs).unwrap();
        for (a, b) in x.iter().zip(&xd) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn block_tridiagonal_matches_dense() {
        let nb = 5;
        let bs = 3;
        let mut seed = 3u64;
        let mut mk = |shift: f64| {
            DMatrix::from_fn(bs, bs, |i, j| {
                c(pseudo_random(&mut seed), pseudo_random(&mut seed)) + if i == j { c(shift, 0.0) } else { ZERO }
            })
        };
        let diag: Vec<_> = (0..nb).map(|_| mk(5.0)).collect();
        let lower: Vec<_> = (0..nb).map(|_| mk(0.0)).collect();
        let upper: Vec<_> = (0..nb).map(|_| mk(0.0)).collect();
        let rhs: Vec<DVector<C64>> = (0..nb)
            .map(|i| DVector::from_fn(bs, |j, _| c((i * bs + j) as f64, 0.0)))
            .collect();
        let sys = BlockTridiagonal { lower, diag, upper };
        let x = sys.solve(&rhs).unwrap();
        let mut m = DMatrix::<C64>::zeros(nb * bs, nb * bs);
        for i in 0..nb {
            m.view_mut((i * bs, i * bs), (bs, bs)).copy_from(&sys.diag[i]);
            if i > 0 {
                m.view_mut((i * bs, (i - 1) * bs), (bs, bs)).copy_from(&sys.lower[i]);
            }
            if i + 1 < nb {
                m.view_mut((i * bs, (i + 1) * bs), (bs, bs)).copy_from(&sys.upper[i]);
            }
        }
        let flat: Vec<C64> = rhs.iter().flat_map(|v| v.iter().copied()).collect();
        let xd = solve_dense(&m, &flat).unwrap();
        let xf: Vec<C64> = x.iter().flat_map(|v| v.iter().copied()).collect();
        for (a, b) in xf.iter().zip(&xd) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
