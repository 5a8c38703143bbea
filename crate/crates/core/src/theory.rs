//! Restricted isometry constants by enumeration, the root functions `G` and `Ĝ`,
//! and the convergence constants and error bounds of DTAM and PGROTP.

use crate::error::{Error, Result};
use crate::linalg::eigen::extreme_eigenvalues;
use crate::linalg::hard_threshold;
use crate::matrix::{norm2, DenseMatrix};
use crate::problem::RecoveryProblem;

/// Largest number of `k`-subsets [`ric_bruteforce`] will enumerate.
pub const MAX_RIC_SUBSETS: u128 = 1_000_000;

const ROOT_TOL: f64 = 1e-12;

/// `C(n, k)` without overflow for the sizes that matter here.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `δ_k` of `A`: the largest deviation from 1 of an eigenvalue of `A_Sᵀ A_S` over all
/// `|S| = k`.
pub fn ric_bruteforce(a: &DenseMatrix, k: usize) -> Result<f64> {
    let n = a.cols();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("order {k} must lie in 1..={n}")));
    }
    let count = binomial(n, k);
    if count > MAX_RIC_SUBSETS {
        return Err(Error::TooManySubsets {
            count,
            limit: MAX_RIC_SUBSETS,
        });
    }
    let gram = a.gram();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut sub = vec![0.0; k * k];
    let mut delta = 0.0f64;
    loop {
        for (c, &j) in idx.iter().enumerate() {
            for (r, &i) in idx.iter().enumerate() {
                sub[c * k + r] = gram.get(i, j);
            }
        }
        let g = DenseMatrix::new(k, k, sub.clone())?;
        let (lo, hi) = extreme_eigenvalues(&g);
        delta = delta.max(1.0 - lo).max(hi - 1.0);
        // Next subset in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(delta.max(0.0));
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn check_unit_interval(t: f64) -> Result<()> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, 1)")));
    }
    Ok(())
}

fn check_g(g: f64) -> Result<()> {
    if !(g > 0.0 && g <= 1.0) {
        return Err(Error::Domain(format!("g = {g} outside (0, 1]")));
    }
    Ok(())
}

/// `G(t) = [√2 t + t sqrt((5+t)/(1+t)) + sqrt(1-g²)(1+t)] / (1-t) - 1`.
pub fn eval_g(t: f64, g: f64) -> Result<f64> {
    check_unit_interval(t)?;
    check_g(g)?;
    let s = (1.0 - g * g).max(0.0).sqrt();
    let inner = std::f64::consts::SQRT_2 * t + t * ((5.0 + t) / (1.0 + t)).sqrt() + s * (1.0 + t);
    Ok(inner / (1.0 - t) - 1.0)
}

/// `Ĝ(t) = √2 t (1 + 1/sqrt(1+t)) / (1-t) - 1`.
pub fn eval_g_hat(t: f64) -> Result<f64> {
    check_unit_interval(t)?;
    Ok(std::f64::consts::SQRT_2 * t / (1.0 - t) * (1.0 + 1.0 / (1.0 + t).sqrt()) - 1.0)
}

/// Root of an increasing function on `[0, 1)` with a negative value at 0.
fn bisect(f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0 - 1e-12);
    loop {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v.abs() <= ROOT_TOL || mid <= lo || mid >= hi {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// `δ(γ)`: the unique root of `G` in `(0, 1)` for the given `g = g(γ)`.
pub fn find_delta_gamma(g: f64) -> Result<f64> {
    check_g(g)?;
    Ok(bisect(|t| eval_g(t, g).expect("t in [0, 1)")))
}

/// `δ* ≈ 0.272`: the unique root of `Ĝ` in `(0, 1)`.
pub fn find_delta_star() -> f64 {
    bisect(|t| eval_g_hat(t).expect("t in [0, 1)"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryConstants {
    pub delta_k: f64,
    pub delta_2k: f64,
    pub delta_3k: f64,
    pub g: f64,
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
    pub rho_tilde: f64,
    pub rho: f64,
    pub c_beta: f64,
    pub beta_max: f64,
    pub delta_gamma: f64,
    /// `δ_3k < δ(γ)` and β admissible, so that `ρ < 1` and the error bound applies.
    pub valid: bool,
}

fn check_ric_order(delta_k: f64, delta_2k: f64, delta_3k: f64) -> Result<()> {
    if !(0.0 <= delta_k && delta_k <= delta_2k && delta_2k <= delta_3k && delta_3k < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= δ_k <= δ_2k <= δ_3k < 1, got {delta_k}, {delta_2k}, {delta_3k}"
        )));
    }
    Ok(())
}

/// All constants of the DTAM error bound.
///
/// `β = 0` is always admissible inside the regime `δ_3k < δ(γ)`; otherwise `β` must
/// lie strictly below `beta_max`.
pub fn constants_bundle(delta_k: f64, delta_2k: f64, delta_3k: f64, g: f64, beta: f64) -> Result<TheoryConstants> {
    check_ric_order(delta_k, delta_2k, delta_3k)?;
    check_g(g)?;
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidArgument(format!("beta = {beta} outside [0, 1)")));
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    let s = (1.0 - g * g).max(0.0).sqrt();
    let c1 = sqrt2 * delta_3k + s * (1.0 + delta_3k);
    let c2 = (1.0 + delta_2k).sqrt() * (sqrt2 + s);
    let rho_tilde = (c1 + delta_3k * ((5.0 + delta_2k) / (1.0 + delta_2k)).sqrt()) / (1.0 - delta_2k);
    let rho = if beta == 0.0 {
        rho_tilde
    } else {
        rho_tilde + beta + beta / ((1.0 - delta_2k) * (rho_tilde + beta))
    };
    let c_beta = ((c2 + (5.0 + delta_2k).sqrt()) / (1.0 - beta)
        + 2.0 / (1.0 + delta_2k).sqrt()
        + (1.0 + delta_k).sqrt())
        / (1.0 - delta_2k);
    let beta_max = if rho_tilde == 0.0 {
        0.0
    } else {
        2.0 * rho_tilde
            / (delta_2k + (delta_2k * delta_2k + 4.0 * rho_tilde * (1.0 - delta_2k)).sqrt())
            - rho_tilde
    };
    let delta_gamma = find_delta_gamma(g)?;
    let valid = delta_3k < delta_gamma && (beta == 0.0 || beta < beta_max) && rho < 1.0;
    Ok(TheoryConstants {
        delta_k,
        delta_2k,
        delta_3k,
        g,
        beta,
        c1,
        c2,
        rho_tilde,
        rho,
        c_beta,
        beta_max,
        delta_gamma,
        valid,
    })
}

/// `ρᵖ · x0_err + C_β / (1 - ρ) · nu_norm`.
pub fn error_bound(p: usize, x0_err: f64, nu_norm: f64, constants: &TheoryConstants) -> Result<f64> {
    if !constants.valid {
        return Err(Error::InvalidConstants(format!(
            "δ_3k = {} vs δ(γ) = {}, β = {} vs β_max = {}",
            constants.delta_3k, constants.delta_gamma, constants.beta, constants.beta_max
        )));
    }
    let p = i32::try_from(p).map_err(|_| Error::InvalidArgument("iteration index too large".into()))?;
    Ok(constants.rho.powi(p) * x0_err + constants.c_beta / (1.0 - constants.rho) * nu_norm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgrotpConstants {
    pub rho_hat: f64,
    pub c_hat: f64,
    /// `δ_3k < δ*`.
    pub valid: bool,
}

/// `ρ̂` and `Ĉ` of the PGROTP bound with `q̄ = k`.
pub fn pgrotp_constants(delta_k: f64, delta_2k: f64, delta_3k: f64) -> Result<PgrotpConstants> {
    check_ric_order(delta_k, delta_2k, delta_3k)?;
    let sqrt2 = std::f64::consts::SQRT_2;
    let rho_hat = sqrt2 * delta_3k / (1.0 - delta_2k) * (1.0 + (1.0 + delta_k).sqrt()) / (1.0 + delta_2k).sqrt();
    let c_hat = (sqrt2 + 2.0 / (1.0 + delta_2k).sqrt() + (sqrt2 + 1.0) * (1.0 + delta_k).sqrt()) / (1.0 - delta_2k);
    let valid = delta_3k < find_delta_star();
    if valid {
        assert!(rho_hat < 1.0, "ρ̂ = {rho_hat} must be below 1 when δ_3k < δ*");
    }
    Ok(PgrotpConstants { rho_hat, c_hat, valid })
}

/// `ν' = ν + A x_{S̄}` with `S` the top-k support of the ground truth.
pub fn effective_noise(problem: &RecoveryProblem) -> Result<Vec<f64>> {
    let truth = problem
        .ground_truth
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("problem carries no ground truth".into()))?;
    let head = hard_threshold(truth, problem.k)?;
    let tail: Vec<f64> = truth.iter().zip(&head).map(|(t, h)| t - h).collect();
    let mut nu = problem.a.matvec(&tail)?;
    if let Some(noise) = &problem.noise {
        nu.iter_mut().zip(noise).for_each(|(v, e)| *v += e);
    }
    Ok(nu)
}

/// One row of an error-bound check: `||xᵖ - x_S||` against the bound at `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub p: usize,
    pub observed: f64,
    pub bound: f64,
}

/// Compares every iterate `xᵖ` with [`error_bound`] using `x⁰`'s distance to `x_S`
/// and `||ν'||` from [`effective_noise`].
pub fn check_error_bound(problem: &RecoveryProblem, iterates: &[Vec<f64>], constants: &TheoryConstants) -> Result<Vec<BoundCheck>> {
    let truth = problem
        .ground_truth
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("problem carries no ground truth".into()))?;
    let head = hard_threshold(truth, problem.k)?;
    let nu = norm2(&effective_noise(problem)?);
    let dist = |x: &[f64]| x.iter().zip(&head).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let x0_err = iterates.first().map(|x| dist(x)).unwrap_or(0.0);
    iterates
        .iter()
        .enumerate()
        .map(|(p, x)| {
            Ok(BoundCheck {
                p,
                observed: dist(x),
                bound: error_bound(p, x0_err, nu, constants)?,
            })
        })
        .collect()
}
