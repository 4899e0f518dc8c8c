use super::{svd, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Minimum-norm least-squares solution with the detected numerical rank.
#[derive(Debug, Clone)]
pub struct LstsqSolution<T: Real = f64> {
    pub x: Vec<T>,
    pub rank: usize,
}

impl<T: Real> LstsqSolution<T> {
    pub fn is_full_rank(&self) -> bool {
        self.rank == self.x.len()
    }
}

/// Solves `min ||M x - y||_2`, returning the minimizer of smallest norm.
///
/// Householder QR with column pivoting; when the pivoted `R` is numerically
/// rank deficient the triangular factor is pseudo-inverted through its SVD.
pub fn least_squares_minnorm<T: Real>(m: &DenseMatrix<T>, y: &[T]) -> Result<LstsqSolution<T>> {
    let (rows, cols) = (m.rows(), m.cols());
    if y.len() != rows {
        return Err(Error::LengthMismatch {
            expected: rows,
            actual: y.len(),
        });
    }
    if rows == 0 || cols == 0 {
        return Ok(LstsqSolution {
            x: vec![T::zero(); cols],
            rank: 0,
        });
    }

    // column-major working copy
    let mut w: Vec<Vec<T>> = (0..cols).map(|c| (0..rows).map(|r| m[(r, c)]).collect()).collect();
    let mut qty = y.to_vec();
    let mut perm: Vec<usize> = (0..cols).collect();
    let steps = rows.min(cols);
    let mut done = 0;

    for k in 0..steps {
        let (best, best_norm) = (k..cols)
            .map(|j| (j, w[j][k..].iter().fold(T::zero(), |s, &v| s + v * v)))
            .fold((k, -T::one()), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best_norm <= T::zero() {
            break;
        }
        w.swap(k, best);
        perm.swap(k, best);

        let norm = super::norm2(&w[k][k..]);
        let alpha = if w[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = w[k][k..].to_vec();
        v[0] -= alpha;
        let vtv = v.iter().fold(T::zero(), |s, &x| s + x * x);
        if vtv > T::zero() {
            let apply = |col: &mut [T]| {
                let proj = v.iter().zip(col.iter()).fold(T::zero(), |s, (&a, &b)| s + a * b);
                let f = T::lit(2.0) * proj / vtv;
                for (c, &vi) in col.iter_mut().zip(&v) {
                    *c -= f * vi;
                }
            };
            for col in w.iter_mut().skip(k + 1) {
                apply(&mut col[k..]);
            }
            apply(&mut qty[k..]);
        }
        w[k][k] = alpha;
        w[k][k + 1..rows].fill(T::zero());
        done = k + 1;
    }

    let r00 = if done > 0 { w[0][0].abs() } else { T::zero() };
    let tol = T::epsilon() * T::from_count(rows.max(cols)) * T::lit(10.0) * r00;
    let rank = (0..done).take_while(|&k| w[k][k].abs() > tol).count();

    let mut x = vec![T::zero(); cols];
    if rank == 0 {
        return Ok(LstsqSolution { x, rank });
    }
    if rank == cols {
        let mut z = vec![T::zero(); cols];
        for k in (0..cols).rev() {
            let mut acc = qty[k];
            for j in k + 1..cols {
                acc -= w[j][k] * z[j];
            }
            z[k] = acc / w[k][k];
        }
        for (k, &p) in perm.iter().enumerate() {
            x[p] = z[k];
        }
        return Ok(LstsqSolution { x, rank });
    }

    let r_top = DenseMatrix::from_fn(done, cols, |r, c| if r <= c { w[c][r] } else { T::zero() });
    let d = svd(&r_top);
    let cutoff = d.s.first().copied().unwrap_or(T::zero()) * T::epsilon() * T::from_count(rows.max(cols)) * T::lit(10.0);
    let mut z = vec![T::zero(); cols];
    for (i, &sigma) in d.s.iter().enumerate() {
        if sigma <= cutoff {
            continue;
        }
        let coef = (0..done).fold(T::zero(), |s, r| s + d.u[(r, i)] * qty[r]) / sigma;
        for (j, zj) in z.iter_mut().enumerate() {
            *zj += coef * d.v[(j, i)];
        }
    }
    for (k, &p) in perm.iter().enumerate() {
        x[p] = z[k];
    }
    Ok(LstsqSolution { x, rank })
}
