//! Householder QR with column pivoting and a minimum-norm least-squares solve.

use crate::matrix::{dot, DenseMatrix};

/// Relative threshold on `|R_jj| / |R_00|` below which a pivot is treated as zero.
pub const RANK_TOL: f64 = 1e-12;

struct Reflector {
    /// Row offset the reflector starts at.
    start: usize,
    v: Vec<f64>,
    beta: f64,
}

impl Reflector {
    /// Reflector mapping `x` onto a multiple of the first unit vector.
    /// Returns the reflector and the resulting diagonal value.
    fn new(start: usize, x: &[f64]) -> (Self, f64) {
        let norm = dot(x, x).sqrt();
        if norm == 0.0 {
            return (
                Self {
                    start,
                    v: vec![0.0; x.len()],
                    beta: 0.0,
                },
                0.0,
            );
        }
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vv = dot(&v, &v);
        let beta = if vv == 0.0 { 0.0 } else { 2.0 / vv };
        (Self { start, v, beta }, alpha)
    }

    #[inline]
    fn apply(&self, x: &mut [f64]) {
        if self.beta == 0.0 {
            return;
        }
        let seg = &mut x[self.start..self.start + self.v.len()];
        let s = self.beta * dot(&self.v, seg);
        for (xi, vi) in seg.iter_mut().zip(&self.v) {
            *xi -= s * vi;
        }
    }
}

/// Column-pivoted QR factorisation `A P = Q R` of an `m x n` matrix.
pub struct PivotedQr {
    m: usize,
    n: usize,
    /// Upper-trapezoidal `R`, column-major `m x n` (below-diagonal part is garbage).
    r: Vec<f64>,
    reflectors: Vec<Reflector>,
    perm: Vec<usize>,
}

impl PivotedQr {
    pub fn new(a: &DenseMatrix) -> Self {
        Self::from_column_major(a.rows(), a.cols(), a.data().to_vec(), true)
    }

    fn from_column_major(m: usize, n: usize, mut w: Vec<f64>, pivot: bool) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::with_capacity(m.min(n));
        for j in 0..m.min(n) {
            if pivot {
                // Largest trailing column norm, first index on ties.
                let mut best = j;
                let mut best_norm = -1.0;
                for c in j..n {
                    let col = &w[c * m + j..(c + 1) * m];
                    let nrm = dot(col, col);
                    if nrm > best_norm {
                        best_norm = nrm;
                        best = c;
                    }
                }
                if best != j {
                    for i in 0..m {
                        w.swap(j * m + i, best * m + i);
                    }
                    perm.swap(j, best);
                }
            }
            let (h, alpha) = Reflector::new(j, &w[j * m + j..(j + 1) * m]);
            for c in j + 1..n {
                h.apply(&mut w[c * m..(c + 1) * m]);
            }
            w[j * m + j] = alpha;
            for i in j + 1..m {
                w[j * m + i] = 0.0;
            }
            reflectors.push(h);
        }
        Self {
            m,
            n,
            r: w,
            reflectors,
            perm,
        }
    }

    #[inline]
    fn r_at(&self, i: usize, j: usize) -> f64 {
        self.r[j * self.m + i]
    }

    /// Numerical rank: leading pivots with `|R_jj| > RANK_TOL * |R_00|`.
    pub fn rank(&self) -> usize {
        let kmax = self.m.min(self.n);
        if kmax == 0 {
            return 0;
        }
        let lead = self.r_at(0, 0).abs();
        if lead == 0.0 {
            return 0;
        }
        (0..kmax)
            .take_while(|&j| self.r_at(j, j).abs() > RANK_TOL * lead)
            .count()
    }

    /// Column permutation: column `j` of `A P` is column `perm()[j]` of `A`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// `Q^T b`.
    pub fn apply_qt(&self, b: &[f64]) -> Vec<f64> {
        let mut c = b.to_vec();
        for h in &self.reflectors {
            h.apply(&mut c);
        }
        c
    }

    /// Minimum-norm minimiser of `||A x - b||_2`.
    ///
    /// Full column rank: back substitution on `R`. Rank deficient: the leading
    /// `r x n` block `T = [R11 R12]` is factored as `T^T = Q2 R2`, and the
    /// minimum-norm solution of `T z = c` is `z = Q2 R2^{-T} c`.
    pub fn solve_min_norm(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.m, "right-hand side length mismatch");
        let rank = self.rank();
        let mut x = vec![0.0; self.n];
        if rank == 0 {
            return x;
        }
        let c = self.apply_qt(b);
        let z = if rank == self.n {
            let mut z = c[..rank].to_vec();
            for i in (0..rank).rev() {
                let mut s = z[i];
                for j in i + 1..rank {
                    s -= self.r_at(i, j) * z[j];
                }
                z[i] = s / self.r_at(i, i);
            }
            z
        } else {
            // T^T is n x rank, column-major: column i of T^T is row i of T.
            let n = self.n;
            let mut tt = vec![0.0; n * rank];
            for i in 0..rank {
                for j in i..n {
                    tt[i * n + j] = self.r_at(i, j);
                }
            }
            let second = PivotedQr::from_column_major(n, rank, tt, false);
            // Forward substitution with R2^T (lower triangular).
            let mut t = c[..rank].to_vec();
            for i in 0..rank {
                let mut s = t[i];
                for j in 0..i {
                    s -= second.r_at(j, i) * t[j];
                }
                t[i] = s / second.r_at(i, i);
            }
            // z = Q2 [t; 0]
            let mut z = vec![0.0; n];
            z[..rank].copy_from_slice(&t);
            for h in second.reflectors.iter().rev() {
                h.apply(&mut z);
            }
            z
        };
        for (j, &p) in self.perm.iter().enumerate() {
            x[p] = z[j];
        }
        x
    }

    /// The thin orthonormal factor `Q` (`m x min(m, n)` columns), for building orthonormal bases.
    pub fn thin_q(&self) -> DenseMatrix {
        let k = self.m.min(self.n);
        let mut cols = Vec::with_capacity(k);
        for j in 0..k {
            let mut e = vec![0.0; self.m];
            e[j] = 1.0;
            for h in self.reflectors.iter().rev() {
                h.apply(&mut e);
            }
            cols.push(e);
        }
        DenseMatrix::from_columns(&cols).expect("Q factor is finite")
    }
}

/// Orthonormal basis of the column space of a full-column-rank `a` (no pivoting, so
/// column order is preserved).
pub fn orthonormalize(a: &DenseMatrix) -> DenseMatrix {
    PivotedQr::from_column_major(a.rows(), a.cols(), a.data().to_vec(), false).thin_q()
}
