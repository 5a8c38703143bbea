//! Recovery algorithms behind one driver with shared stopping logic.
//!
//! Every solver starts from `x⁰ = 0`. At the top of iteration `p` the loop checks,
//! in order: the residual tolerance (skipped when `y = 0`), the relative-change
//! tolerance (from `p = 1`, skipped when disabled or `xᵖ = 0`), and the iteration
//! cap. Solver-specific stops (zero direction, no progress) come after.

mod dtam;
mod omp;
mod pgrotp;
mod sp;
mod stomp;

pub use dtam::dtam;
pub use omp::omp;
pub use pgrotp::pgrotp;
pub use sp::sp;
pub use stomp::stomp;

use std::time::Instant;

use crate::error::Result;
use crate::linalg::SupportSet;
use crate::matrix::{norm2, residual};
use crate::problem::{
    AlgoConfig, Algorithm, DebugTrace, IterationRecord, PursuitTrace, QpStats, RecoveryProblem,
    StopReason,
};
use crate::qp::QpSolution;

/// Run `algorithm` on `problem`.
pub fn solve(algorithm: Algorithm, problem: &RecoveryProblem, config: &AlgoConfig) -> Result<PursuitTrace> {
    match algorithm {
        Algorithm::Dtam => dtam(problem, config),
        Algorithm::Pgrotp => pgrotp(problem, config),
        Algorithm::Omp => omp(problem, config),
        Algorithm::Sp => sp(problem, config),
        Algorithm::Stomp => stomp(problem, config),
    }
}

pub(crate) struct StopRule {
    residual_abs: f64,
    rel_change_tol: f64,
    max_iters: usize,
    y_is_zero: bool,
}

impl StopRule {
    pub(crate) fn new(problem: &RecoveryProblem, config: &AlgoConfig, algorithm: Algorithm) -> Self {
        let ynorm = norm2(&problem.y);
        Self {
            residual_abs: config.residual_tol * ynorm,
            rel_change_tol: config.rel_change_tol,
            max_iters: config.max_iters_for(algorithm),
            y_is_zero: ynorm == 0.0,
        }
    }

    pub(crate) fn residual_met(&self, res_norm: f64) -> bool {
        !self.y_is_zero && res_norm <= self.residual_abs
    }

    pub(crate) fn check(&self, p: usize, res_norm: f64, x: &[f64], prev: Option<&[f64]>) -> Option<StopReason> {
        if self.residual_met(res_norm) {
            return Some(StopReason::ResidualTol);
        }
        if self.rel_change_tol > 0.0 {
            if let Some(prev) = prev {
                let xn = norm2(x);
                if xn > 0.0 {
                    let change = x.iter().zip(prev).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    if change / xn <= self.rel_change_tol {
                        return Some(StopReason::RelativeChangeTol);
                    }
                }
            }
        }
        if p >= self.max_iters {
            return Some(StopReason::MaxIters);
        }
        None
    }
}

/// Accumulates iteration records and optional debug vectors.
pub(crate) struct Recorder {
    start: Instant,
    iterates: Vec<IterationRecord>,
    debug: Option<DebugTrace>,
}

impl Recorder {
    pub(crate) fn new(record_debug: bool) -> Self {
        Self {
            start: Instant::now(),
            iterates: Vec::new(),
            debug: record_debug.then(DebugTrace::default),
        }
    }

    pub(crate) fn push(&mut self, p: usize, x: &[f64], residual_norm: f64) {
        self.iterates.push(IterationRecord {
            p,
            support: SupportSet::support_of(x),
            residual_norm,
            q: None,
            candidate_size: None,
            qp: None,
            elapsed: self.start.elapsed(),
        });
        if let Some(d) = &mut self.debug {
            d.xs.push(x.to_vec());
        }
    }

    /// Annotates the latest record with what its step selected.
    pub(crate) fn annotate(&mut self, q: Option<usize>, candidate_size: Option<usize>, qp: Option<&QpSolution>, dim: usize) {
        let rec = self.iterates.last_mut().expect("push before annotate");
        rec.q = q;
        rec.candidate_size = candidate_size;
        rec.qp = qp.map(|s| QpStats {
            dim,
            iterations: s.iterations,
            objective: s.objective,
            kkt_residual: s.kkt_residual,
            hit_iteration_cap: s.hit_iteration_cap,
        });
    }

    pub(crate) fn debug_mut(&mut self) -> Option<&mut DebugTrace> {
        self.debug.as_mut()
    }

    pub(crate) fn finish(self, final_x: Vec<f64>, stop_reason: StopReason) -> PursuitTrace {
        PursuitTrace {
            iterates: self.iterates,
            final_x,
            stop_reason,
            debug: self.debug,
        }
    }
}

pub(crate) fn residual_norm(problem: &RecoveryProblem, x: &[f64]) -> Result<(Vec<f64>, f64)> {
    let res = residual(&problem.a, x, &problem.y)?;
    let n = norm2(&res);
    Ok((res, n))
}
