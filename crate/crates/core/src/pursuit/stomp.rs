use super::{residual_norm, Recorder, StopRule};
use crate::error::Result;
use crate::linalg::{least_squares_on_support, top_k_indices, SupportSet};
use crate::problem::{AlgoConfig, Algorithm, PursuitTrace, RecoveryProblem, StopReason};

/// Stagewise OMP with a fixed threshold.
///
/// Stage `s` admits every column with `|Aᵀ res|_i > t_s ||res|| / √m` and refits on
/// the enlarged support, which may grow to `max(k, ⌊m/2⌋)` columns (the strongest
/// columns win when a stage would overshoot). The loop stops when no column can be
/// admitted ([`StopReason::ZeroDirection`]), the residual is small enough, or after
/// the stage cap. If the support then exceeds `k`, one final step keeps the `k`
/// largest coefficients and refits.
pub fn stomp(problem: &RecoveryProblem, config: &AlgoConfig) -> Result<PursuitTrace> {
    config.validate()?;
    let (a, y, k) = (&problem.a, &problem.y, problem.k);
    let rule = StopRule::new(problem, config, Algorithm::Stomp);
    let mut rec = Recorder::new(config.record_debug);
    let sqrt_m = (problem.m() as f64).sqrt();
    let cap = k.max(problem.m() / 2);
    let mut x = vec![0.0; problem.n()];
    let mut prev: Option<Vec<f64>> = None;
    let mut support = SupportSet::empty();
    let mut p = 0;
    let reason = loop {
        let (res, res_norm) = residual_norm(problem, &x)?;
        rec.push(p, &x, res_norm);
        if let Some(reason) = rule.check(p, res_norm, &x, prev.as_deref()) {
            break reason;
        }
        let corr = a.matvec_t(&res)?;
        let threshold = config.stomp_threshold * res_norm / sqrt_m;
        let mut passing: Vec<usize> = (0..corr.len())
            .filter(|&i| !support.contains(i) && corr[i].abs() > threshold)
            .collect();
        passing.sort_by(|&i, &j| corr[j].abs().total_cmp(&corr[i].abs()).then(i.cmp(&j)));
        passing.truncate(cap - support.len());
        if passing.is_empty() {
            break StopReason::ZeroDirection;
        }
        rec.annotate(Some(passing.len()), Some(support.len() + passing.len()), None, 0);
        support = support.union(&SupportSet::from_indices(passing));
        if let Some(d) = rec.debug_mut() {
            d.gradients.push(corr.clone());
            d.directions.push(corr);
            d.next_supports.push(support.clone());
        }
        let next = least_squares_on_support(a, y, &support)?;
        prev = Some(std::mem::replace(&mut x, next));
        p += 1;
    };
    if SupportSet::support_of(&x).len() > k {
        let pruned = top_k_indices(&x, k)?;
        if let Some(d) = rec.debug_mut() {
            d.next_supports.push(pruned.clone());
        }
        x = least_squares_on_support(a, y, &pruned)?;
        let (_, res_norm) = residual_norm(problem, &x)?;
        rec.push(p + 1, &x, res_norm);
    }
    Ok(rec.finish(x, reason))
}
