use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct SymEigen<T: Real = f64> {
    pub values: Vec<T>,
    pub vectors: DenseMatrix<T>,
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigen<T: Real>(m: &DenseMatrix<T>) -> Result<Vec<T>> {
    sym_eigen_decomp(m).map(|e| e.values)
}

/// Cyclic Jacobi eigen decomposition of a symmetric matrix.
pub fn sym_eigen_decomp<T: Real>(m: &DenseMatrix<T>) -> Result<SymEigen<T>> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: m.cols(),
        });
    }
    let scale = m.max_abs();
    let tol = T::lit(1e-10).max(T::epsilon() * T::lit(64.0)) * scale.max(T::one());
    let mut asym = T::zero();
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym > tol || m.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::NotSymmetric(asym.as_f64()));
    }

    let mut a = m.clone();
    // symmetrize exactly so rotations keep the invariant
    for i in 0..n {
        for j in 0..i {
            let avg = (a[(i, j)] + a[(j, i)]) / T::lit(2.0);
            a[(i, j)] = avg;
            a[(j, i)] = avg;
        }
    }
    let mut v = DenseMatrix::identity(n);
    let frob2 = a.as_slice().iter().fold(T::zero(), |s, &x| s + x * x);
    let stop = T::epsilon() * T::epsilon() * frob2;

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(T::one()));
                let c = T::one() / t.hypot(T::one());
                let s = t * c;
                a[(p, p)] -= t * apq;
                a[(q, q)] += t * apq;
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        let np = c * arp - s * arq;
                        let nq = c * arq + s * arp;
                        a[(r, p)] = np;
                        a[(p, r)] = np;
                        a[(r, q)] = nq;
                        a[(q, r)] = nq;
                    }
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymEigen { values, vectors })
}
