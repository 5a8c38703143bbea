use super::{residual_norm, Recorder, StopRule};
use crate::error::{Error, Result};
use crate::linalg::{hard_threshold, least_squares_on_support, top_k_indices, SupportSet};
use crate::matrix::{axpy, norm2};
use crate::problem::{AlgoConfig, Algorithm, PursuitTrace, RecoveryProblem, StopReason};
use crate::qp::{solve_w_subproblem, SumMode};

/// Partial gradient optimal thresholding: `uᵖ = xᵖ + H_q̄(Aᵀ(y - Axᵖ))`, then the
/// weight subproblem picks `k` indices of `uᵖ` and least squares refits.
///
/// The weight subproblem over all `n` coordinates is solved on `supp(uᵖ)` with
/// `Σw <= k`: coordinates outside the support do not touch the objective and can
/// absorb leftover mass as long as at least `k` of them exist. When they do not,
/// the full equality-constrained problem is solved instead.
///
/// The update depends on `xᵖ` alone, so once `xᵖ⁺¹ = xᵖ` exactly every later iterate
/// repeats; the loop stops there with [`StopReason::RelativeChangeTol`] and returns
/// the same point it would reach at the iteration cap.
pub fn pgrotp(problem: &RecoveryProblem, config: &AlgoConfig) -> Result<PursuitTrace> {
    config.validate()?;
    let (a, y, k) = (&problem.a, &problem.y, problem.k);
    let n = problem.n();
    let qbar = config.qbar.unwrap_or(k);
    if qbar < k || qbar > n {
        return Err(Error::InvalidArgument(format!("qbar = {qbar} must lie in {k}..={n}")));
    }
    let rule = StopRule::new(problem, config, Algorithm::Pgrotp);
    let mut rec = Recorder::new(config.record_debug);

    let mut x = vec![0.0; n];
    let mut prev: Option<Vec<f64>> = None;
    let mut p = 0;
    loop {
        let (res, res_norm) = residual_norm(problem, &x)?;
        rec.push(p, &x, res_norm);
        if let Some(reason) = rule.check(p, res_norm, &x, prev.as_deref()) {
            return Ok(rec.finish(x, reason));
        }

        let grad = a.matvec_t(&res)?;
        let partial = hard_threshold(&grad, qbar)?;
        if norm2(&partial) == 0.0 {
            return Ok(rec.finish(x, StopReason::ZeroDirection));
        }
        let mut u = partial.clone();
        axpy(1.0, &x, &mut u);

        let supp = SupportSet::support_of(&u);
        let (v, mode) = if n - supp.len() >= k {
            (supp, SumMode::AtMost)
        } else {
            (SupportSet::full(n), SumMode::Equality)
        };
        let sol = solve_w_subproblem(a, y, &u, &v, k, mode)?;
        let mut uw = vec![0.0; n];
        for (i, wi) in v.iter().zip(&sol.w) {
            uw[i] = u[i] * wi;
        }
        let next_support = top_k_indices(&uw, k)?;
        rec.annotate(Some(qbar), Some(v.len()), Some(&sol), v.len());
        if let Some(d) = rec.debug_mut() {
            d.gradients.push(grad);
            d.directions.push(partial.clone());
            d.selections.push((SupportSet::support_of(&partial), top_k_indices(&partial, k)?));
            d.next_supports.push(next_support.clone());
        }

        let next = least_squares_on_support(a, y, &next_support)?;
        let fixed = next == x;
        prev = Some(std::mem::replace(&mut x, next));
        p += 1;
        if fixed {
            let (_, res_norm) = residual_norm(problem, &x)?;
            rec.push(p, &x, res_norm);
            return Ok(rec.finish(x, StopReason::RelativeChangeTol));
        }
    }
}
