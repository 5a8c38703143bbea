//! Seeded random test problems.

use dtam_core::matrix::normalize_columns;
use dtam_core::rng::SplitMix64;
use dtam_core::{DenseMatrix, Error, RecoveryProblem, Result};

/// Gaussian sensing matrix with unit-norm columns and a `k`-sparse Gaussian signal
/// placed uniformly at random; `y = A x*`.
///
/// Draw order from one stream seeded with `seed`: the `m·n` entries of `Â` in
/// column-major order, then the `k` support positions, then the `k` nonzero values.
pub fn gen_instance(n: usize, m: usize, k: usize, seed: u64) -> Result<RecoveryProblem> {
    gen_noisy_instance(n, m, k, 0.0, seed)
}

/// As [`gen_instance`], plus `ν ~ N(0, noise_std² I)` drawn after the signal.
pub fn gen_noisy_instance(n: usize, m: usize, k: usize, noise_std: f64, seed: u64) -> Result<RecoveryProblem> {
    if !(k >= 1 && k <= m && m < n) {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= m < n, got n={n}, m={m}, k={k}"
        )));
    }
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise level {noise_std} must be nonnegative")));
    }
    let mut rng = SplitMix64::new(seed);
    let ahat = DenseMatrix::new(m, n, rng.gaussian_vec(m * n))?;
    let a = normalize_columns(&ahat)?;
    let mut x = vec![0.0; n];
    for i in rng.sample_indices(n, k) {
        x[i] = rng.gaussian();
    }
    let mut y = a.matvec(&x)?;
    let noise = if noise_std > 0.0 {
        let nu: Vec<f64> = (0..m).map(|_| noise_std * rng.gaussian()).collect();
        y.iter_mut().zip(&nu).for_each(|(v, e)| *v += e);
        Some(nu)
    } else {
        None
    };
    RecoveryProblem::with_truth(a, y, k, Some(x), noise)
}
