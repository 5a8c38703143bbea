use super::{residual_norm, Recorder, StopRule};
use crate::error::{Error, Result};
use crate::linalg::{least_squares_on_support, restrict_to_support, top_k_indices, SupportSet};
use crate::matrix::axpy;
use crate::meanfun::select_q;
use crate::problem::{AlgoConfig, Algorithm, PursuitTrace, RecoveryProblem, StopReason};
use crate::qp::{solve_w_subproblem, SumMode};

/// Dynamic thresholding with memory.
///
/// Each step thresholds the memory direction `rᵖ = Aᵀ(y - Axᵖ) + β rᵖ⁻¹` down to
/// the `q` indices picked by [`select_q`], merges them with `supp(xᵖ)`, prunes back
/// to `k` indices through the weight subproblem when needed, and refits by least
/// squares.
pub fn dtam(problem: &RecoveryProblem, config: &AlgoConfig) -> Result<PursuitTrace> {
    config.validate()?;
    config.mean_function.validate(problem.k)?;
    let (a, y, k) = (&problem.a, &problem.y, problem.k);
    let n = problem.n();
    let rule = StopRule::new(problem, config, Algorithm::Dtam);
    let mut rec = Recorder::new(config.record_debug);

    let mut x = vec![0.0; n];
    let mut prev: Option<Vec<f64>> = None;
    let mut r = vec![0.0; n];
    let mut p = 0;
    loop {
        let (res, res_norm) = residual_norm(problem, &x)?;
        rec.push(p, &x, res_norm);
        if let Some(reason) = rule.check(p, res_norm, &x, prev.as_deref()) {
            return Ok(rec.finish(x, reason));
        }

        // S1
        let grad = a.matvec_t(&res)?;
        r.iter_mut().for_each(|v| *v *= config.beta);
        axpy(1.0, &grad, &mut r);
        let sel = match select_q(&r, k, config.gamma, &config.mean_function) {
            Ok(s) => s,
            Err(Error::ZeroDirection) => return Ok(rec.finish(x, StopReason::ZeroDirection)),
            Err(e) => return Err(e),
        };
        let mut u = restrict_to_support(&r, &sel.omega_q)?;
        axpy(1.0, &x, &mut u);

        // S2
        let v = SupportSet::support_of(&x).union(&sel.omega_q);
        assert!(v.len() <= 2 * k, "candidate set exceeds 2k");
        let (next_support, qp) = if v.len() <= k {
            (v.clone(), None)
        } else {
            let sol = solve_w_subproblem(a, y, &u, &v, k, SumMode::Equality)?;
            let mut uw = vec![0.0; n];
            for (i, wi) in v.iter().zip(&sol.w) {
                uw[i] = u[i] * wi;
            }
            (top_k_indices(&uw, k)?, Some(sol))
        };
        rec.annotate(Some(sel.q), Some(v.len()), qp.as_ref(), v.len());
        if let Some(d) = rec.debug_mut() {
            d.gradients.push(grad);
            d.directions.push(r.clone());
            d.selections.push((sel.omega_q, sel.omega_k));
            d.next_supports.push(next_support.clone());
        }

        // S3
        let next = least_squares_on_support(a, y, &next_support)?;
        prev = Some(std::mem::replace(&mut x, next));
        p += 1;
    }
}
