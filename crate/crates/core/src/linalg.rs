//! Symmetric eigendecomposition via cyclic Jacobi rotations.
//!
//! Only used on small C x C channel covariances, where Jacobi's cubic
//! sweeps are cheap and its accuracy on symmetric matrices is excellent.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

const MAX_SWEEPS: usize = 64;

/// Decomposes a symmetric `n x n` matrix (row-major) into eigenvalues and
/// an orthonormal eigenvector matrix `v` (row-major; column `k` of `v` is
/// the eigenvector for `eigenvalues[k]`).
pub(crate) fn symmetric_eigen<T: Real>(matrix: &[T], n: usize) -> Result<(Vec<T>, Vec<T>)> {
    debug_assert_eq!(matrix.len(), n * n);
    for (i, x) in matrix.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::Eigen(format!("non-finite matrix entry at {i}")));
        }
    }

    let mut a = matrix.to_vec();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    if n == 1 {
        return Ok((vec![a[0]], v));
    }

    let frob = a
        .iter()
        .fold(T::zero(), |acc, &x| acc + x * x)
        .sqrt()
        .max(T::min_positive_value());
    let tol = T::epsilon() * frob;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a, n) <= tol {
            let eigenvalues = (0..n).map(|i| a[i * n + i]).collect();
            return Ok((eigenvalues, v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (lit::<T>(2.0) * apq);
                let t = {
                    let denom = theta.abs() + (theta * theta + T::one()).sqrt();
                    if theta >= T::zero() {
                        denom.recip()
                    } else {
                        -denom.recip()
                    }
                };
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;

                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[i * n + p];
                        let aiq = a[i * n + q];
                        a[i * n + p] = c * aip - s * aiq;
                        a[p * n + i] = a[i * n + p];
                        a[i * n + q] = s * aip + c * aiq;
                        a[q * n + i] = a[i * n + q];
                    }
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();

                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }
    Err(Error::Eigen(format!(
        "Jacobi iteration did not converge within {MAX_SWEEPS} sweeps"
    )))
}

fn off_diagonal_norm<T: Real>(a: &[T], n: usize) -> T {
    let mut sum = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum = sum + a[i * n + j] * a[i * n + j];
            }
        }
    }
    sum.sqrt()
}
