//! Dense symmetric eigensolver (cyclic Jacobi) and the orthonormal basis of
//! the sum-zero hyperplane used to compress the negative type form.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_RTOL: f64 = 1e-14;

/// Eigenvalues in ascending order with matching unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub sweeps: usize,
}

/// Cyclic Jacobi rotations until every off-diagonal entry is below
/// `1e-14 * ||A||_F`.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> Result<Eigen> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "jacobi_eigen needs a square matrix");
    let mut a = a.clone();
    // symmetrize against round-off in the caller's products
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
    let mut v = DMatrix::<f64>::identity(n, n);
    let fro = a.norm();
    let threshold = OFF_DIAGONAL_RTOL * fro;
    let mut sweeps = 0;
    loop {
        let mut max_off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                max_off = max_off.max(a[(p, q)].abs());
            }
        }
        if max_off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::EigensolverFailure { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a[(p, p)] -= t * apq;
                a[(q, q)] += t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        let new_kp = akp - s * (akq + tau * akp);
                        let new_kq = akq + s * (akp - tau * akq);
                        a[(k, p)] = new_kp;
                        a[(p, k)] = new_kp;
                        a[(k, q)] = new_kq;
                        a[(q, k)] = new_kq;
                    }
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp - s * (vkq + tau * vkp);
                    v[(k, q)] = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigen {
        values,
        vectors,
        sweeps,
    })
}

/// Helmert basis: `n x (n-1)` matrix with orthonormal columns spanning
/// `{x : sum x = 0}`.
pub fn hyperplane_basis(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n - 1, |r, c| {
        let k = (c + 1) as f64;
        let norm = (k * (k + 1.0)).sqrt();
        if r <= c {
            1.0 / norm
        } else if r == c + 1 {
            -k / norm
        } else {
            0.0
        }
    })
}

/// `-Q^T M Q`: the negated form restricted to the sum-zero hyperplane.
pub fn compress_negated(m: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    -(q.transpose() * m * q)
}

pub fn quadratic_form(m: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += m[(i, j)] * x[j];
        }
        s += x[i] * row;
    }
    s
}

pub fn unit(v: DVector<f64>) -> DVector<f64> {
    let norm = v.norm();
    if norm > 0.0 {
        v / norm
    } else {
        v
    }
}
