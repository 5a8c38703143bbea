use super::{residual_norm, Recorder, StopRule};
use crate::error::Result;
use crate::linalg::{least_squares_on_support, SupportSet};
use crate::problem::{AlgoConfig, Algorithm, PursuitTrace, RecoveryProblem, StopReason};

/// Orthogonal matching pursuit: exactly `k` greedy steps, each adding the column most
/// correlated with the residual (smaller index on ties) and refitting.
pub fn omp(problem: &RecoveryProblem, config: &AlgoConfig) -> Result<PursuitTrace> {
    config.validate()?;
    let (a, y, k) = (&problem.a, &problem.y, problem.k);
    let rule = StopRule::new(problem, config, Algorithm::Omp);
    let mut rec = Recorder::new(config.record_debug);
    let mut x = vec![0.0; problem.n()];
    let mut support = SupportSet::empty();
    for p in 0..=k {
        let (res, res_norm) = residual_norm(problem, &x)?;
        rec.push(p, &x, res_norm);
        if p == k {
            let reason = if rule.residual_met(res_norm) {
                StopReason::ResidualTol
            } else {
                StopReason::MaxIters
            };
            return Ok(rec.finish(x, reason));
        }
        let corr = a.matvec_t(&res)?;
        let mut best: Option<(usize, f64)> = None;
        for (j, c) in corr.iter().enumerate() {
            if support.contains(j) {
                continue;
            }
            if best.is_none_or(|(_, b)| c.abs() > b) {
                best = Some((j, c.abs()));
            }
        }
        let (j, _) = best.expect("k <= n leaves a free column");
        support = support.union(&SupportSet::from_indices(vec![j]));
        rec.annotate(Some(1), Some(support.len()), None, 0);
        if let Some(d) = rec.debug_mut() {
            d.gradients.push(corr.clone());
            d.directions.push(corr);
            d.next_supports.push(support.clone());
        }
        x = least_squares_on_support(a, y, &support)?;
    }
    unreachable!("loop returns at p == k")
}
