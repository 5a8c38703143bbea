//! Problem bundle, solver configuration and iteration traces shared by every algorithm.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::linalg::SupportSet;
use crate::matrix::{norm2, DenseMatrix};
use crate::meanfun::MeanFunctionSpec;

/// `(A, y, k)` with optional ground truth and noise for evaluation.
#[derive(Debug, Clone)]
pub struct RecoveryProblem {
    pub a: DenseMatrix,
    pub y: Vec<f64>,
    pub k: usize,
    pub ground_truth: Option<Vec<f64>>,
    pub noise: Option<Vec<f64>>,
}

impl RecoveryProblem {
    pub fn new(a: DenseMatrix, y: Vec<f64>, k: usize) -> Result<Self> {
        Self::with_truth(a, y, k, None, None)
    }

    pub fn with_truth(
        a: DenseMatrix,
        y: Vec<f64>,
        k: usize,
        ground_truth: Option<Vec<f64>>,
        noise: Option<Vec<f64>>,
    ) -> Result<Self> {
        if k == 0 || k > a.cols() {
            return Err(Error::InvalidArgument(format!(
                "sparsity level {k} must lie in 1..={}",
                a.cols()
            )));
        }
        if y.len() != a.rows() {
            return Err(Error::Dimension(format!(
                "y has length {} but A has {} rows",
                y.len(),
                a.rows()
            )));
        }
        if let Some(p) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(p));
        }
        if let Some(x) = &ground_truth {
            if x.len() != a.cols() {
                return Err(Error::Dimension("ground truth length must equal n".into()));
            }
        }
        if let Some(nu) = &noise {
            if nu.len() != a.rows() {
                return Err(Error::Dimension("noise length must equal m".into()));
            }
        }
        if let (Some(x), Some(nu)) = (&ground_truth, &noise) {
            let mut pred = a.matvec(x)?;
            pred.iter_mut().zip(nu).for_each(|(p, e)| *p += e);
            let gap: f64 = pred.iter().zip(&y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            if gap > 1e-12 * norm2(&y).max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "y differs from A x + noise by {gap:e}"
                )));
            }
        }
        Ok(Self {
            a,
            y,
            k,
            ground_truth,
            noise,
        })
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// `||x - x*|| / ||x*||` against the ground truth, if present.
    pub fn relative_error(&self, x: &[f64]) -> Option<f64> {
        let truth = self.ground_truth.as_ref()?;
        let diff: f64 = x.iter().zip(truth).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let scale = norm2(truth);
        Some(if scale == 0.0 { diff } else { diff / scale })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Dtam,
    Pgrotp,
    Omp,
    Sp,
    Stomp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Dtam,
        Algorithm::Pgrotp,
        Algorithm::Omp,
        Algorithm::Sp,
        Algorithm::Stomp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dtam => "dtam",
            Algorithm::Pgrotp => "pgrotp",
            Algorithm::Omp => "omp",
            Algorithm::Sp => "sp",
            Algorithm::Stomp => "stomp",
        }
    }

    /// Iteration caps: 50 for DTAM/PGROTP, 150 for SP, 50 stages for StOMP.
    /// OMP always runs `k` iterations and ignores the cap.
    pub fn default_max_iters(self) -> usize {
        match self {
            Algorithm::Dtam | Algorithm::Pgrotp | Algorithm::Stomp => 50,
            Algorithm::Sp => 150,
            Algorithm::Omp => usize::MAX,
        }
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|a| *a == self).expect("listed")
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgoConfig {
    /// Selection threshold γ in (0, 1].
    pub gamma: f64,
    /// Forgetting factor β in [0, 1).
    pub beta: f64,
    pub mean_function: MeanFunctionSpec,
    /// `None` uses [`Algorithm::default_max_iters`].
    pub max_iters: Option<usize>,
    /// Stop when `||y - Ax|| <= residual_tol * ||y||`.
    pub residual_tol: f64,
    /// Stop when `||x^p - x^{p-1}|| / ||x^p|| <= rel_change_tol`; 0 disables.
    pub rel_change_tol: f64,
    /// PGROTP partial-gradient size q̄; `None` means `k`.
    pub qbar: Option<usize>,
    /// StOMP threshold multiplier t_s.
    pub stomp_threshold: f64,
    pub rng_seed: u64,
    /// Keep full per-iteration vectors in the trace (DTAM and PGROTP).
    pub record_debug: bool,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        Self {
            gamma: 0.1,
            beta: 0.4,
            mean_function: MeanFunctionSpec::log_sum_exp(1.0),
            max_iters: None,
            residual_tol: 1e-10,
            rel_change_tol: 0.0,
            qbar: None,
            stomp_threshold: 2.5,
            rng_seed: 0,
            record_debug: false,
        }
    }
}

impl AlgoConfig {
    /// Settings for noisy data: stop on small relative change instead of a tiny residual.
    pub fn noisy() -> Self {
        Self {
            residual_tol: 0.0,
            rel_change_tol: 1e-3,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must lie in (0, 1], got {}",
                self.gamma
            )));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(Error::InvalidArgument(format!(
                "beta must lie in [0, 1), got {}",
                self.beta
            )));
        }
        if self.max_iters == Some(0) {
            return Err(Error::InvalidArgument("max_iters must be positive".into()));
        }
        if !(self.residual_tol >= 0.0) || !(self.rel_change_tol >= 0.0) {
            return Err(Error::InvalidArgument("tolerances must be nonnegative".into()));
        }
        if self.qbar == Some(0) {
            return Err(Error::InvalidArgument("qbar must be positive".into()));
        }
        if !(self.stomp_threshold > 0.0) {
            return Err(Error::InvalidArgument("stomp threshold must be positive".into()));
        }
        Ok(())
    }

    pub fn max_iters_for(&self, algorithm: Algorithm) -> usize {
        self.max_iters.unwrap_or_else(|| algorithm.default_max_iters())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ResidualTol,
    RelativeChangeTol,
    MaxIters,
    ZeroDirection,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::ResidualTol => "residual_tol",
            StopReason::RelativeChangeTol => "relative_change_tol",
            StopReason::MaxIters => "max_iters",
            StopReason::ZeroDirection => "zero_direction",
        }
    }
}

/// Summary of one weight-subproblem solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpStats {
    pub dim: usize,
    pub iterations: usize,
    pub objective: f64,
    pub kkt_residual: f64,
    pub hit_iteration_cap: bool,
}

/// State at the start of iteration `p`, plus what that iteration selected.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub p: usize,
    /// Support of `x^p`.
    pub support: SupportSet,
    /// `||y - A x^p||`.
    pub residual_norm: f64,
    /// Number of indices taken from the search direction in this iteration.
    pub q: Option<usize>,
    /// Size of the candidate set handed to the weight subproblem (or the pruning step).
    pub candidate_size: Option<usize>,
    pub qp: Option<QpStats>,
    /// Wall time since the solver started.
    pub elapsed: Duration,
}

/// Full per-iteration vectors, kept when [`AlgoConfig::record_debug`] is set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DebugTrace {
    /// `x^0, x^1, ...` including the final iterate.
    pub xs: Vec<Vec<f64>>,
    /// Plain negative gradients `A^T (y - A x^p)`.
    pub gradients: Vec<Vec<f64>>,
    /// Search directions actually thresholded (memory-weighted for DTAM).
    pub directions: Vec<Vec<f64>>,
    /// `(Ω_q, Ω_k)` chosen at each iteration.
    pub selections: Vec<(SupportSet, SupportSet)>,
    /// `S^{p+1}` produced by each iteration.
    pub next_supports: Vec<SupportSet>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PursuitTrace {
    pub iterates: Vec<IterationRecord>,
    pub final_x: Vec<f64>,
    pub stop_reason: StopReason,
    pub debug: Option<DebugTrace>,
}

impl PursuitTrace {
    /// Number of update steps performed.
    pub fn iterations(&self) -> usize {
        self.iterates.last().map_or(0, |r| r.p)
    }
}
