use super::{residual_norm, Recorder, StopRule};
use crate::error::Result;
use crate::linalg::{least_squares_on_support, top_k_indices, SupportSet};
use crate::problem::{AlgoConfig, Algorithm, PursuitTrace, RecoveryProblem, StopReason};

/// Subspace pursuit.
///
/// Each step merges `supp(xᵖ)` with the top-k correlations of the residual, fits on
/// the merged set, keeps the `k` largest coefficients and refits. A step whose
/// residual is not strictly smaller is discarded and the loop stops with
/// [`StopReason::RelativeChangeTol`], since the returned iterate no longer changes.
pub fn sp(problem: &RecoveryProblem, config: &AlgoConfig) -> Result<PursuitTrace> {
    config.validate()?;
    let (a, y, k) = (&problem.a, &problem.y, problem.k);
    let rule = StopRule::new(problem, config, Algorithm::Sp);
    let mut rec = Recorder::new(config.record_debug);
    let mut x = vec![0.0; problem.n()];
    let mut prev: Option<Vec<f64>> = None;
    let (mut res, mut res_norm) = residual_norm(problem, &x)?;
    let mut p = 0;
    loop {
        rec.push(p, &x, res_norm);
        if let Some(reason) = rule.check(p, res_norm, &x, prev.as_deref()) {
            return Ok(rec.finish(x, reason));
        }
        let corr = a.matvec_t(&res)?;
        let candidates = SupportSet::support_of(&x).union(&top_k_indices(&corr, k)?);
        let wide = least_squares_on_support(a, y, &candidates)?;
        let pruned = top_k_indices(&wide, k)?;
        let next = least_squares_on_support(a, y, &pruned)?;
        let (next_res, next_norm) = residual_norm(problem, &next)?;
        rec.annotate(Some(k), Some(candidates.len()), None, 0);
        if let Some(d) = rec.debug_mut() {
            d.gradients.push(corr.clone());
            d.directions.push(corr);
            d.next_supports.push(pruned);
        }
        if next_norm >= res_norm {
            return Ok(rec.finish(x, StopReason::RelativeChangeTol));
        }
        prev = Some(std::mem::replace(&mut x, next));
        res = next_res;
        res_norm = next_norm;
        p += 1;
    }
}
