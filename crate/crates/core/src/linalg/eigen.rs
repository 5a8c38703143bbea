//! Cyclic Jacobi eigenvalues for small symmetric matrices.

use crate::matrix::DenseMatrix;

/// Stop once the off-diagonal Frobenius norm drops below this fraction of the full norm.
pub const JACOBI_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(a: &DenseMatrix) -> Vec<f64> {
    assert_eq!(a.rows(), a.cols(), "matrix must be square");
    let n = a.rows();
    let mut w = a.data().to_vec();
    let at = |w: &[f64], i: usize, j: usize| w[j * n + i];
    let total: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if total == 0.0 {
        return vec![0.0; n];
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|j| (0..n).filter(move |&i| i != j).map(move |i| (i, j)))
            .map(|(i, j)| at(&w, i, j).powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = at(&w, p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = at(&w, p, p);
                let aqq = at(&w, q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = at(&w, k, p);
                    let akq = at(&w, k, q);
                    w[p * n + k] = c * akp - s * akq;
                    w[q * n + k] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = at(&w, p, k);
                    let aqk = at(&w, q, k);
                    w[k * n + p] = c * apk - s * aqk;
                    w[k * n + q] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| at(&w, i, i)).collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn extreme_eigenvalues(a: &DenseMatrix) -> (f64, f64) {
    let ev = sym_eigenvalues(a);
    (ev[0], ev[ev.len() - 1])
}
