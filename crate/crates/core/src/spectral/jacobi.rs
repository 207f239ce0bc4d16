//! Cyclic Jacobi eigensolver for dense symmetric matrices.

use crate::error::{Error, Result};

/// Sweep cap before reporting non-convergence.
pub const MAX_SWEEPS: usize = 100;

/// Off-diagonal Frobenius norm target relative to `‖A‖_F`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Eigen-decomposition `A = Q Λ Qᵀ` of a symmetric `n×n` row-major matrix.
///
/// Returns the (unsorted) eigenvalues and, when requested, the eigenvectors
/// as the columns of a row-major `n×n` matrix.
pub fn jacobi_eigen(matrix: &[f64], n: usize, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    assert_eq!(matrix.len(), n * n, "matrix must be n x n");
    let mut a = matrix.to_vec();
    let mut q = want_vectors.then(|| {
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            q[i * n + i] = 1.0;
        }
        q
    });

    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = OFF_DIAGONAL_TOL * frob;
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        s.sqrt()
    };

    let mut off = off_norm(&a);
    let mut sweeps = 0;
    while off > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NotConverged { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for r in (p + 1)..n {
                let apq = a[p * n + r];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[r * n + r];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    if k == p || k == r {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + r];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[k * n + p] = new_kp;
                    a[p * n + k] = new_kp;
                    a[k * n + r] = new_kq;
                    a[r * n + k] = new_kq;
                }
                a[p * n + p] = app - t * apq;
                a[r * n + r] = aqq + t * apq;
                a[p * n + r] = 0.0;
                a[r * n + p] = 0.0;

                if let Some(q) = q.as_mut() {
                    for k in 0..n {
                        let vkp = q[k * n + p];
                        let vkq = q[k * n + r];
                        q[k * n + p] = c * vkp - s * vkq;
                        q[k * n + r] = s * vkp + c * vkq;
                    }
                }
            }
        }
        off = off_norm(&a);
    }
    let eigenvalues = (0..n).map(|i| a[i * n + i]).collect();
    Ok((eigenvalues, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_swap() {
        let (mut l, _) = jacobi_eigen(&[0.0, 1.0, 1.0, 0.0], 2, false).unwrap();
        l.sort_by(|a, b| b.total_cmp(a));
        assert!((l[0] - 1.0).abs() < 1e-15 && (l[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn vectors_reconstruct_matrix() {
        let n = 5;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = 1.0 / (1.0 + i as f64 + j as f64);
            }
        }
        let (l, q) = jacobi_eigen(&m, n, true).unwrap();
        let q = q.unwrap();
        for i in 0..n {
            for j in 0..n {
                let rec: f64 = (0..n).map(|k| q[i * n + k] * l[k] * q[j * n + k]).sum();
                assert!((rec - m[i * n + j]).abs() < 1e-13);
            }
        }
    }
}
