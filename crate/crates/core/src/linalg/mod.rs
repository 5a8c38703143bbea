//! Thresholding operators, top-k selection and support-restricted least squares.

pub mod eigen;
pub mod qr;
mod support;

pub use support::SupportSet;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use qr::PivotedQr;

/// Indices of the `k` largest-magnitude entries of `u`. Ties go to the smaller index.
pub fn top_k_indices(u: &[f64], k: usize) -> Result<SupportSet> {
    Ok(SupportSet::from_indices(ranked_top_k(u, k)?))
}

/// The same `k` indices as [`top_k_indices`], ordered by decreasing magnitude.
pub fn ranked_top_k(u: &[f64], k: usize) -> Result<Vec<usize>> {
    if k > u.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds vector length {}",
            u.len()
        )));
    }
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&a, &b| u[b].abs().total_cmp(&u[a].abs()).then(a.cmp(&b)));
    order.truncate(k);
    Ok(order)
}

/// `H_k(u)`: keep the top-k entries of `u`, zero the rest.
pub fn hard_threshold(u: &[f64], k: usize) -> Result<Vec<f64>> {
    let s = top_k_indices(u, k)?;
    restrict_to_support(u, &s)
}

/// `u` on `s`, zero elsewhere.
pub fn restrict_to_support(u: &[f64], s: &SupportSet) -> Result<Vec<f64>> {
    s.check_bound(u.len())?;
    let mut out = vec![0.0; u.len()];
    for i in s.iter() {
        out[i] = u[i];
    }
    Ok(out)
}

/// Least-squares fit of `y` using only the columns in `s`; the returned vector is
/// full length and zero off `s`. Rank-deficient column sets give the minimum-norm
/// minimiser.
pub fn least_squares_on_support(a: &DenseMatrix, y: &[f64], s: &SupportSet) -> Result<Vec<f64>> {
    if y.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "measurement vector of length {} does not match {} rows",
            y.len(),
            a.rows()
        )));
    }
    s.check_bound(a.cols())?;
    let mut x = vec![0.0; a.cols()];
    if s.is_empty() {
        return Ok(x);
    }
    let sub = a.select_columns(s.indices())?;
    let z = PivotedQr::new(&sub).solve_min_norm(y);
    for (i, zi) in s.iter().zip(z) {
        x[i] = zi;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{neg_gradient, norm2, norm_inf};
    use crate::rng::SplitMix64;

    fn set(v: &[usize]) -> SupportSet {
        SupportSet::from_indices(v.to_vec())
    }

    #[test]
    fn top_k_examples() {
        assert_eq!(top_k_indices(&[3.0, -1.0, 0.0, 2.0], 2).unwrap(), set(&[0, 3]));
        assert_eq!(top_k_indices(&[1.0, -1.0], 1).unwrap(), set(&[0]));
        assert!(top_k_indices(&[1.0, 2.0], 0).unwrap().is_empty());
        assert!(top_k_indices(&[1.0], 2).is_err());
    }

    #[test]
    fn top_k_matches_full_sort_oracle() {
        let mut rng = SplitMix64::new(8);
        for _ in 0..50 {
            // Coarse values force plenty of ties.
            let u: Vec<f64> = (0..12).map(|_| (rng.below(7) as f64) - 3.0).collect();
            let mut pairs: Vec<(f64, usize)> = u.iter().map(|v| v.abs()).zip(0..).collect();
            // Bubble sort by (magnitude desc, index asc).
            for i in 0..pairs.len() {
                for j in 0..pairs.len() - 1 - i {
                    let (a, b) = (pairs[j], pairs[j + 1]);
                    if a.0 < b.0 || (a.0 == b.0 && a.1 > b.1) {
                        pairs.swap(j, j + 1);
                    }
                }
            }
            let want = set(&pairs[..5].iter().map(|p| p.1).collect::<Vec<_>>());
            assert_eq!(top_k_indices(&u, 5).unwrap(), want);
        }
    }

    #[test]
    fn hard_threshold_examples() {
        assert_eq!(
            hard_threshold(&[3.0, -1.0, 0.0, 2.0], 2).unwrap(),
            vec![3.0, 0.0, 0.0, 2.0]
        );
        let sparse = vec![0.0, 5.0, 0.0, -2.0];
        assert_eq!(hard_threshold(&sparse, 3).unwrap(), sparse);
    }

    #[test]
    fn hard_threshold_is_best_k_term_approximation() {
        let mut rng = SplitMix64::new(21);
        for n in 4..=10 {
            let u = rng.gaussian_vec(n);
            for k in 0..=n {
                let h = hard_threshold(&u, k).unwrap();
                let err: f64 = u.iter().zip(&h).map(|(a, b)| (a - b).powi(2)).sum();
                // Exhaustive oracle over every support of size k.
                let mut best = f64::INFINITY;
                for mask in 0u32..(1 << n) {
                    if mask.count_ones() as usize != k {
                        continue;
                    }
                    let e: f64 = (0..n)
                        .filter(|i| mask & (1 << i) == 0)
                        .map(|i| u[i] * u[i])
                        .sum();
                    best = best.min(e);
                }
                assert!(err <= best + 1e-12);
            }
        }
    }

    #[test]
    fn restrict_examples() {
        let u = [1.0, 2.0, 3.0];
        assert_eq!(restrict_to_support(&u, &set(&[1])).unwrap(), vec![0.0, 2.0, 0.0]);
        assert_eq!(restrict_to_support(&u, &SupportSet::full(3)).unwrap(), u.to_vec());
        assert_eq!(restrict_to_support(&u, &SupportSet::empty()).unwrap(), vec![0.0; 3]);
        assert!(restrict_to_support(&u, &set(&[3])).is_err());
    }

    #[test]
    fn least_squares_identity_and_empty() {
        let a = DenseMatrix::identity(3);
        let y = [5.0, 7.0, 9.0];
        assert_eq!(
            least_squares_on_support(&a, &y, &set(&[0, 2])).unwrap(),
            vec![5.0, 0.0, 9.0]
        );
        assert_eq!(
            least_squares_on_support(&a, &y, &SupportSet::empty()).unwrap(),
            vec![0.0; 3]
        );
    }

    #[test]
    fn least_squares_matches_normal_equations() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..20 {
            let a = DenseMatrix::new(6, 10, rng.gaussian_vec(60)).unwrap();
            let y = rng.gaussian_vec(6);
            let s = set(&[1, 4, 7]);
            let x = least_squares_on_support(&a, &y, &s).unwrap();

            // Normal equations with an explicit 3x3 inverse (cofactors).
            let g = a.select_columns(s.indices()).unwrap().gram();
            let b = a.select_columns(s.indices()).unwrap().matvec_t(&y).unwrap();
            let m = |i: usize, j: usize| g.get(i, j);
            let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
            let cof = |i: usize, j: usize| {
                let r: Vec<usize> = (0..3).filter(|&t| t != i).collect();
                let c: Vec<usize> = (0..3).filter(|&t| t != j).collect();
                let minor = m(r[0], c[0]) * m(r[1], c[1]) - m(r[0], c[1]) * m(r[1], c[0]);
                if (i + j).is_multiple_of(2) { minor } else { -minor }
            };
            for (row, idx) in s.iter().enumerate() {
                let want: f64 = (0..3).map(|col| cof(col, row) * b[col]).sum::<f64>() / det;
                assert!((x[idx] - want).abs() <= 1e-8 * want.abs().max(1.0));
            }

            let grad = neg_gradient(&a, &x, &y).unwrap();
            let on_s: Vec<f64> = s.iter().map(|i| grad[i]).collect();
            let scale = norm_inf(&a.matvec_t(&y).unwrap());
            assert!(norm_inf(&on_s) <= 1e-10 * scale);
        }
    }

    #[test]
    fn least_squares_rank_deficient_is_min_norm() {
        // Column 2 duplicates column 0.
        let mut rng = SplitMix64::new(2);
        let c0 = rng.gaussian_vec(5);
        let c1 = rng.gaussian_vec(5);
        let a = DenseMatrix::from_columns(&[c0.clone(), c1, c0]).unwrap();
        let y = rng.gaussian_vec(5);
        let x = least_squares_on_support(&a, &y, &SupportSet::full(3)).unwrap();
        assert!((x[0] - x[2]).abs() < 1e-10, "{x:?}");
        let grad = neg_gradient(&a, &x, &y).unwrap();
        assert!(norm_inf(&grad) < 1e-10);
        assert!(norm2(&x).is_finite());
    }
}
