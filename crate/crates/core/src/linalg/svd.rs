use super::{dot, DenseMatrix};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 80;

/// Thin SVD `A = U diag(s) V^T`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd<T: Real = f64> {
    pub u: DenseMatrix<T>,
    pub s: Vec<T>,
    pub v: DenseMatrix<T>,
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd<T: Real>(a: &DenseMatrix<T>) -> Svd<T> {
    if a.rows() < a.cols() {
        let t = svd(&a.transpose());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    let (p, q) = (a.rows(), a.cols());
    let mut w: Vec<Vec<T>> = (0..q).map(|c| (0..p).map(|r| a[(r, c)]).collect()).collect();
    let mut v: Vec<Vec<T>> = (0..q)
        .map(|c| (0..q).map(|r| if r == c { T::one() } else { T::zero() }).collect())
        .collect();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..q {
            for j in i + 1..q {
                let alpha = dot(&w[i], &w[i]);
                let beta = dot(&w[j], &w[j]);
                let gamma = dot(&w[i], &w[j]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(T::one()));
                let c = T::one() / t.hypot(T::one());
                let s = c * t;
                rotate(&mut w, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut s: Vec<T> = w.iter().map(|col| super::norm2(col)).collect();
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&x, &y| s[y].partial_cmp(&s[x]).expect("finite singular values"));
    let u = DenseMatrix::from_fn(p, q, |r, c| {
        let k = order[c];
        if s[k] > T::zero() {
            w[k][r] / s[k]
        } else {
            T::zero()
        }
    });
    let vm = DenseMatrix::from_fn(q, q, |r, c| v[order[c]][r]);
    s = order.iter().map(|&k| s[k]).collect();
    Svd { u, s, v: vm }
}

fn rotate<T: Real>(cols: &mut [Vec<T>], i: usize, j: usize, c: T, s: T) {
    let (lo, hi) = cols.split_at_mut(j);
    for (x, y) in lo[i].iter_mut().zip(hi[0].iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}
