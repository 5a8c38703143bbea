//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero if
//! any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use dtam_cli::demo::{signal_demo, DemoConfig, SignalKind};
use dtam_cli::experiment::{aggregate_csv, phase_transition, rows_csv, ExperimentConfig};
use dtam_cli::report::{theory_report, TheoryArgs};
use dtam_core::linalg::qr::orthonormalize;
use dtam_core::linalg::{hard_threshold, least_squares_on_support, SupportSet};
use dtam_core::matrix::{neg_gradient, norm2, normalize_columns};
use dtam_core::meanfun::g_gamma;
use dtam_core::pursuit::dtam;
use dtam_core::qp::{project_capped_simplex, solve_w_subproblem, CappedSimplexSpec, SumMode};
use dtam_core::rng::SplitMix64;
use dtam_core::theory::{check_error_bound, constants_bundle, eval_g_hat, ric_bruteforce};
use dtam_core::transforms::{dwt, idwt, WaveletFamily, WaveletSpec};
use dtam_core::{AlgoConfig, Algorithm, DenseMatrix, MeanFunctionSpec, RecoveryProblem};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gaussian_matrix(rng: &mut SplitMix64, m: usize, n: usize) -> DenseMatrix {
    DenseMatrix::new(m, n, rng.gaussian_vec(m * n)).unwrap()
}

fn norm_on(v: &[f64], s: &SupportSet) -> f64 {
    s.iter().map(|i| v[i] * v[i]).sum::<f64>().sqrt()
}

fn random_subset(rng: &mut SplitMix64, n: usize, size: usize) -> SupportSet {
    SupportSet::from_indices(rng.sample_indices(n, size))
}

// 1 ------------------------------------------------------------------------------

fn delta_star() -> Outcome {
    let start = Instant::now();
    let report = theory_report(&TheoryArgs::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let d = report.delta_star;
    let resid = eval_g_hat(d).unwrap().abs();
    ensure((0.270..=0.274).contains(&d), || format!("δ* = {d}"))?;
    ensure(resid <= 1e-12, || format!("|Ĝ(δ*)| = {resid:e}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("δ* = {d:.6}, |Ĝ(δ*)| = {resid:.1e}, {elapsed:.2?}"))
}

// 2 ------------------------------------------------------------------------------

fn g_gamma_identity() -> Outcome {
    let spec = MeanFunctionSpec::lp_norm(2.0);
    for k in [1, 5, 10, 40] {
        for gamma in [0.1, 0.5, 1.0] {
            let g = g_gamma(&spec, k, gamma, 0).map_err(|e| e.to_string())?.g;
            ensure(g == gamma, || format!("k={k}: g({gamma}) = {g}"))?;
        }
    }
    Ok("g(γ) = γ for γ ∈ {0.1, 0.5, 1.0}".into())
}

// 3 ------------------------------------------------------------------------------

/// Dense Gaussian elimination with partial pivoting; `None` when singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() <= 1e-11 * scale {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for j in c..n {
                a[r][j] -= f * a[c][j];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|j| a[r][j] * x[j]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Minimum of `||y - Σ w_j b_j||²` over the capped simplex by enumerating every
/// (at 0, at 1, free) pattern and solving the KKT system of each face.
fn qp_oracle(b: &[Vec<f64>], y: &[f64], k: usize, mode: SumMode) -> f64 {
    let d = b.len();
    let obj = |w: &[f64]| -> f64 {
        let mut r = y.to_vec();
        for (wj, bj) in w.iter().zip(b) {
            for (ri, bij) in r.iter_mut().zip(bj) {
                *ri -= wj * bij;
            }
        }
        r.iter().map(|v| v * v).sum()
    };
    let dotv = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(a, c)| a * c).sum::<f64>();
    let mut best = f64::INFINITY;
    for code in 0..3usize.pow(d as u32) {
        let mut state = vec![0u8; d];
        let mut c = code;
        for s in state.iter_mut() {
            *s = (c % 3) as u8;
            c /= 3;
        }
        let free: Vec<usize> = (0..d).filter(|&j| state[j] == 2).collect();
        let mut w: Vec<f64> = state.iter().map(|&s| if s == 1 { 1.0 } else { 0.0 }).collect();
        let mut r0 = y.to_vec();
        for j in 0..d {
            if state[j] == 1 {
                for (ri, bij) in r0.iter_mut().zip(&b[j]) {
                    *ri -= bij;
                }
            }
        }
        let fixed_mass = w.iter().sum::<f64>();
        let sum_options: &[bool] = match mode {
            SumMode::Equality => &[true],
            SumMode::AtMost => &[true, false],
        };
        for &with_sum in sum_options {
            let f = free.len();
            let ok = if f == 0 {
                true
            } else {
                let dim = if with_sum { f + 1 } else { f };
                let mut mat = vec![vec![0.0; dim]; dim];
                let mut rhs = vec![0.0; dim];
                for (p, &i) in free.iter().enumerate() {
                    for (q, &j) in free.iter().enumerate() {
                        mat[p][q] = 2.0 * dotv(&b[i], &b[j]);
                    }
                    rhs[p] = 2.0 * dotv(&b[i], &r0);
                    if with_sum {
                        mat[p][f] = 1.0;
                        mat[f][p] = 1.0;
                    }
                }
                if with_sum {
                    rhs[f] = k as f64 - fixed_mass;
                }
                match solve_dense(mat, rhs) {
                    Some(sol) => {
                        for (p, &i) in free.iter().enumerate() {
                            w[i] = sol[p];
                        }
                        true
                    }
                    None => false,
                }
            };
            if !ok {
                continue;
            }
            let total: f64 = w.iter().sum();
            let in_box = w.iter().all(|&v| (-1e-9..=1.0 + 1e-9).contains(&v));
            let sum_ok = if with_sum {
                (total - k as f64).abs() <= 1e-9
            } else {
                total <= k as f64 + 1e-9
            };
            if in_box && sum_ok {
                let clipped: Vec<f64> = w.iter().map(|v| v.clamp(0.0, 1.0)).collect();
                best = best.min(obj(&clipped));
            }
        }
    }
    best
}

fn bisection_tau(v: &[f64], k: f64) -> f64 {
    let total = |t: f64| v.iter().map(|x| (x - t).clamp(0.0, 1.0)).sum::<f64>();
    let mut lo = v.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let mut hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn qp_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = SplitMix64::new(3003);
    let mut worst_obj = 0.0f64;
    for case in 0..200 {
        let d = 2 + rng.below(5);
        let k = 1 + rng.below(d.min(3));
        let m = 3 + rng.below(6);
        let mode = if case % 2 == 0 { SumMode::Equality } else { SumMode::AtMost };
        let a = gaussian_matrix(&mut rng, m, d);
        let u = rng.gaussian_vec(d);
        let y = rng.gaussian_vec(m);
        let sol = solve_w_subproblem(&a, &y, &u, &SupportSet::full(d), k, mode).map_err(|e| e.to_string())?;
        let cols: Vec<Vec<f64>> = (0..d).map(|j| a.col(j).iter().map(|v| v * u[j]).collect()).collect();
        let oracle = qp_oracle(&cols, &y, k, mode);
        let gap = (sol.objective - oracle).abs();
        worst_obj = worst_obj.max(gap);
        ensure(gap <= 1e-6, || format!("case {case}: solver {} vs oracle {oracle}", sol.objective))?;
    }
    let mut worst_kkt = 0.0f64;
    for case in 0..200 {
        let d = 1 + rng.below(6);
        let k = 1 + rng.below(d.min(3));
        let mode = if case % 2 == 0 { SumMode::Equality } else { SumMode::AtMost };
        let v: Vec<f64> = (0..d).map(|_| rng.uniform_range(-1.5, 2.5)).collect();
        let spec = CappedSimplexSpec::new(d, k, mode);
        let w = project_capped_simplex(&v, &spec).map_err(|e| e.to_string())?;
        let clamp_sum: f64 = v.iter().map(|x| x.clamp(0.0, 1.0)).sum();
        let tau = if mode == SumMode::AtMost && clamp_sum <= k as f64 {
            0.0
        } else {
            bisection_tau(&v, k as f64)
        };
        let mut resid = w
            .iter()
            .zip(&v)
            .fold(0.0f64, |m, (wi, vi)| m.max((wi - (vi - tau).clamp(0.0, 1.0)).abs()));
        if tau != 0.0 {
            resid = resid.max((w.iter().sum::<f64>() - k as f64).abs());
        }
        worst_kkt = worst_kkt.max(resid);
        ensure(resid <= 1e-10, || format!("projection case {case}: KKT residual {resid:e}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "max objective gap {worst_obj:.1e}, max projection KKT residual {worst_kkt:.1e}, {elapsed:.2?}"
    ))
}

// 4 ------------------------------------------------------------------------------

fn ric_correctness() -> Outcome {
    let start = Instant::now();
    let mut rng = SplitMix64::new(4004);
    let q = orthonormalize(&gaussian_matrix(&mut rng, 8, 5));
    for k in 1..=5 {
        let d = ric_bruteforce(&q, k).map_err(|e| e.to_string())?;
        ensure(d <= 1e-12, || format!("orthonormal δ_{k} = {d:e}"))?;
    }
    let mut cols: Vec<Vec<f64>> = (0..4).map(|_| rng.gaussian_vec(5)).collect();
    cols[3] = cols[0].clone();
    let dup = normalize_columns(&DenseMatrix::from_columns(&cols).unwrap()).unwrap();
    let d2 = ric_bruteforce(&dup, 2).map_err(|e| e.to_string())?;
    ensure((d2 - 1.0).abs() <= 1e-12, || format!("duplicate-column δ_2 = {d2}"))?;

    let mut sandwich_checks = 0usize;
    for mat in 0..50 {
        let a = normalize_columns(&gaussian_matrix(&mut rng, 6, 10)).unwrap();
        let deltas: Vec<f64> = (1..=6).map(|k| ric_bruteforce(&a, k).unwrap()).collect();
        for k in 1..6 {
            ensure(deltas[k - 1] <= deltas[k], || format!("matrix {mat}: δ_{k} > δ_{}", k + 1))?;
        }
        for _ in 0..1000 {
            let k = 1 + rng.below(6);
            let mut x = vec![0.0; 10];
            for i in rng.sample_indices(10, k) {
                x[i] = rng.gaussian();
            }
            let (xx, ax) = (norm2(&x).powi(2), norm2(&a.matvec(&x).unwrap()).powi(2));
            let d = deltas[k - 1];
            let slack = 1e-12 * xx;
            ensure((1.0 - d) * xx <= ax + slack && ax <= (1.0 + d) * xx + slack, || {
                format!("matrix {mat}: sandwich fails for k={k}")
            })?;
            sandwich_checks += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "orthonormal, duplicate and monotonicity checks hold; {sandwich_checks} sandwich checks; {elapsed:.2?}"
    ))
}

// 5 ------------------------------------------------------------------------------

fn lemma_oracles() -> Outcome {
    let mut rng = SplitMix64::new(5005);
    let (mut c22i, mut c22ii, mut c23, mut c24) = (0, 0, 0, 0);

    // Near-isometry of A^T A and the bound on A^T v: 50 matrices, 10 draws each.
    for _ in 0..50 {
        let n = 6 + rng.below(5);
        let m = 5 + rng.below(6);
        let a = normalize_columns(&gaussian_matrix(&mut rng, m, n)).unwrap();
        let deltas: Vec<f64> = (1..=4).map(|s| ric_bruteforce(&a, s).unwrap()).collect();
        for _ in 0..10 {
            let s = 1 + rng.below(4);
            let t = rng.sample_indices(n, s);
            let su = 1 + rng.below(s);
            let mut u = vec![0.0; n];
            for &i in &t[..su] {
                u[i] = rng.gaussian();
            }
            let w = SupportSet::from_indices(t[rng.below(s)..].to_vec());
            let au = a.matvec(&u).unwrap();
            let atau = a.matvec_t(&au).unwrap();
            let diff: Vec<f64> = u.iter().zip(&atau).map(|(p, q)| p - q).collect();
            let lhs = norm_on(&diff, &w);
            let rhs = deltas[s - 1] * norm2(&u);
            ensure(lhs <= rhs * (1.0 + 1e-12) + 1e-14, || format!("near-isometry: {lhs} > {rhs}"))?;
            c22i += 1;

            let v = rng.gaussian_vec(m);
            let w2 = random_subset(&mut rng, n, s);
            let lhs = norm_on(&a.matvec_t(&v).unwrap(), &w2);
            let rhs = (1.0 + deltas[s - 1]).sqrt() * norm2(&v);
            ensure(lhs <= rhs * (1.0 + 1e-12), || format!("A^T v bound: {lhs} > {rhs}"))?;
            c22ii += 1;
        }
    }

    // Error of least squares on a support.
    while c23 < 500 {
        let n = 8 + rng.below(5);
        let m = n;
        let k = 1 + rng.below(2);
        let a = normalize_columns(&gaussian_matrix(&mut rng, m, n)).unwrap();
        let dk = ric_bruteforce(&a, k).unwrap();
        let d2k = ric_bruteforce(&a, 2 * k).unwrap();
        if d2k >= 1.0 {
            continue;
        }
        for _ in 0..5 {
            let x: Vec<f64> = (0..n).map(|i| rng.gaussian() / (1.0 + i as f64)).collect();
            let nu: Vec<f64> = rng.gaussian_vec(m).iter().map(|v| 0.01 * v).collect();
            let mut y = a.matvec(&x).unwrap();
            y.iter_mut().zip(&nu).for_each(|(p, q)| *p += q);
            let size = 1 + rng.below(k);
            let omega = random_subset(&mut rng, n, size);
            let ustar = least_squares_on_support(&a, &y, &omega).unwrap();
            let xs = hard_threshold(&x, k).unwrap();
            let tail: Vec<f64> = x.iter().zip(&xs).map(|(p, q)| p - q).collect();
            let mut nup = a.matvec(&tail).unwrap();
            nup.iter_mut().zip(&nu).for_each(|(p, q)| *p += q);
            let off: Vec<f64> = (0..n).map(|i| if omega.contains(i) { 0.0 } else { xs[i] }).collect();
            let lhs = norm2(&ustar.iter().zip(&xs).map(|(p, q)| p - q).collect::<Vec<_>>());
            let rhs = norm2(&off) / (1.0 - d2k * d2k).sqrt() + (1.0 + dk).sqrt() / (1.0 - d2k) * norm2(&nup);
            ensure(lhs <= rhs * (1.0 + 1e-12) + 1e-14, || format!("least squares: {lhs} > {rhs}"))?;
            c23 += 1;
        }
    }

    // Hard thresholding error.
    for _ in 0..500 {
        let n = 4 + rng.below(9);
        let k = 1 + rng.below(n.min(5));
        let u = rng.gaussian_vec(n);
        let mut h = vec![0.0; n];
        for i in rng.sample_indices(n, k) {
            h[i] = rng.gaussian();
        }
        let hk = hard_threshold(&u, k).unwrap();
        let s = SupportSet::support_of(&h);
        let sstar = SupportSet::support_of(&hk);
        let diff: Vec<f64> = u.iter().zip(&h).map(|(p, q)| p - q).collect();
        let lhs = norm2(&h.iter().zip(&hk).map(|(p, q)| p - q).collect::<Vec<_>>());
        let rhs = norm_on(&diff, &s.union(&sstar)) + norm_on(&diff, &sstar.difference(&s));
        ensure(lhs <= rhs * (1.0 + 1e-12), || format!("hard thresholding: {lhs} > {rhs}"))?;
        c24 += 1;
    }
    Ok(format!(
        "zero violations: near-isometry {c22i}, A^T v bound {c22ii}, least squares {c23}, hard thresholding {c24} instances"
    ))
}

// 6 ------------------------------------------------------------------------------

fn dtam_invariants() -> Outcome {
    let mut checked_iters = 0usize;
    for run in 0..100u64 {
        let k = 5 + (run as usize % 5) * 5;
        let problem = dtam_cli::instance::gen_instance(256, 80, k, 6000 + run).map_err(|e| e.to_string())?;
        let (a, y) = (&problem.a, &problem.y);
        let scale = a.matvec_t(y).unwrap().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let mut cfg = AlgoConfig {
            record_debug: true,
            ..AlgoConfig::default()
        };
        let g = g_gamma(&cfg.mean_function, k, cfg.gamma, 0).unwrap().g;
        for beta in [cfg.beta, 0.0] {
            cfg.beta = beta;
            let trace = dtam(&problem, &cfg).map_err(|e| e.to_string())?;
            let dbg = trace.debug.as_ref().unwrap();
            for x in &dbg.xs {
                ensure(SupportSet::support_of(x).len() <= k, || format!("run {run}: infeasible iterate"))?;
            }
            for rec in &trace.iterates {
                if let Some(v) = rec.candidate_size {
                    ensure(v <= 2 * k, || format!("run {run}: |V| = {v} > 2k"))?;
                }
            }
            for (p, s) in dbg.next_supports.iter().enumerate() {
                let grad = neg_gradient(a, &dbg.xs[p + 1], y).unwrap();
                let worst = s.iter().fold(0.0f64, |m, i| m.max(grad[i].abs()));
                ensure(worst <= 1e-8 * scale, || format!("run {run}, p={p}: restricted gradient {worst:e}"))?;
            }
            for (p, (r, (oq, ok))) in dbg.directions.iter().zip(&dbg.selections).enumerate() {
                let (a_q, a_k) = (norm_on(r, oq), norm_on(r, ok));
                ensure(a_q >= g * a_k * (1.0 - 1e-12), || {
                    format!("run {run}, p={p}: ||r_Ωq|| = {a_q} < g ||r_Ωk|| = {}", g * a_k)
                })?;
                if beta == 0.0 {
                    let plain = neg_gradient(a, &dbg.xs[p], y).unwrap();
                    let gap = norm2(&r.iter().zip(&plain).map(|(u, v)| u - v).collect::<Vec<_>>());
                    ensure(gap <= 1e-12 * norm2(&plain).max(1e-300), || format!("run {run}: β=0 memory differs"))?;
                } else if p <= 20 {
                    let mut explicit = vec![0.0; r.len()];
                    for (j, gj) in dbg.gradients[..=p].iter().enumerate() {
                        let w = beta.powi((p - j) as i32);
                        explicit.iter_mut().zip(gj).for_each(|(e, v)| *e += w * v);
                    }
                    let gap = norm2(&r.iter().zip(&explicit).map(|(u, v)| u - v).collect::<Vec<_>>());
                    ensure(gap <= 1e-12 * norm2(r), || format!("run {run}, p={p}: recursion gap {gap:e}"))?;
                }
                checked_iters += 1;
            }
        }
    }
    Ok(format!("100 runs (β = 0.4 and β = 0), {checked_iters} iterations checked"))
}

// 7 and 9 -----------------------------------------------------------------------

fn sweep_config(dir: &std::path::Path) -> ExperimentConfig {
    ExperimentConfig {
        n: 400,
        m: 100,
        k_grid: (1..=8).map(|j| 10 * j).collect(),
        trials: 50,
        algorithms: Algorithm::ALL.to_vec(),
        base_seed: 777,
        record_timing: false,
        output_path: dir.join("phase_transition.csv"),
        ..ExperimentConfig::default()
    }
}

fn phase_transition_shape(first_run: &mut Option<(String, String)>) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = sweep_config(dir.path());
    let start = Instant::now();
    let pt = phase_transition(&cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let rows = std::fs::read_to_string(&cfg.output_path).map_err(|e| e.to_string())?;
    let agg = std::fs::read_to_string(cfg.aggregate_path()).map_err(|e| e.to_string())?;
    *first_run = Some((rows, agg));
    let freq = |a: Algorithm, k: usize| pt.success_freq(a, k).unwrap();
    let mut summary = Vec::new();
    for a in [Algorithm::Dtam, Algorithm::Pgrotp, Algorithm::Sp, Algorithm::Omp] {
        ensure(freq(a, 10) >= 0.95, || format!("{a} at k=10: {}", freq(a, 10)))?;
    }
    for a in Algorithm::ALL {
        ensure(freq(a, 80) <= 0.5, || format!("{a} at k=80: {}", freq(a, 80)))?;
        summary.push(format!("{a} {:.2}→{:.2}", freq(a, 10), freq(a, 80)));
    }
    let dtam_curve: Vec<f64> = cfg.k_grid.iter().map(|&k| freq(Algorithm::Dtam, k)).collect();
    for w in dtam_curve.windows(2) {
        ensure(w[1] <= w[0] + 0.1, || format!("DTAM curve rises: {dtam_curve:?}"))?;
    }
    ensure(elapsed < Duration::from_secs(15 * 60), || format!("took {elapsed:?}"))?;
    Ok(format!("{}; DTAM {dtam_curve:?}; {elapsed:.1?}", summary.join(", ")))
}

fn determinism(first_run: &Option<(String, String)>) -> Outcome {
    let (rows1, agg1) = first_run.as_ref().ok_or("criterion 7 produced no output to compare")?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = sweep_config(dir.path());
    let pt = phase_transition(&cfg).map_err(|e| e.to_string())?;
    let rows2 = std::fs::read(&cfg.output_path).map_err(|e| e.to_string())?;
    let agg2 = std::fs::read(cfg.aggregate_path()).map_err(|e| e.to_string())?;
    ensure(rows1.as_bytes() == rows2.as_slice(), || "row CSV differs between runs".into())?;
    ensure(agg1.as_bytes() == agg2.as_slice(), || "aggregate CSV differs between runs".into())?;
    ensure(rows_csv(&pt.rows).as_bytes() == rows2.as_slice(), || "in-memory rows differ from file".into())?;
    ensure(aggregate_csv(&pt.cells).as_bytes() == agg2.as_slice(), || "in-memory aggregates differ".into())?;
    Ok(format!("{} rows, {} bytes identical across two runs", pt.rows.len(), rows2.len()))
}

// 8 ------------------------------------------------------------------------------

fn error_bound_validation() -> Outcome {
    let mut rng = SplitMix64::new(8008);
    let (n, m) = (10, 12);
    let mut instances = 0;
    let mut attempts = 0;
    let mut checks = 0;
    let mut tightest = 0.0f64;
    while instances < 20 {
        attempts += 1;
        ensure(attempts < 2000, || "could not construct instances in the regime".into())?;
        let k = 1 + instances % 2;
        let gamma = if instances % 4 < 2 { 1.0 } else { 0.95 };
        let q = orthonormalize(&gaussian_matrix(&mut rng, m, n));
        let pert = gaussian_matrix(&mut rng, m, n).scaled(0.01);
        let sum: Vec<f64> = q.data().iter().zip(pert.data()).map(|(p, e)| p + e).collect();
        let a = normalize_columns(&DenseMatrix::new(m, n, sum).unwrap()).unwrap();
        let dk = ric_bruteforce(&a, k).unwrap();
        let d2k = ric_bruteforce(&a, 2 * k).unwrap();
        let d3k = ric_bruteforce(&a, 3 * k).unwrap();
        let spec = MeanFunctionSpec::lp_norm(2.0);
        let g = g_gamma(&spec, k, gamma, 0).unwrap().g;
        let base = constants_bundle(dk, d2k, d3k, g, 0.0).unwrap();
        if !base.valid || base.beta_max <= 0.0 {
            continue;
        }
        let beta = if instances % 3 == 0 { 0.0 } else { 0.5 * base.beta_max };
        let constants = constants_bundle(dk, d2k, d3k, g, beta).unwrap();
        if !constants.valid {
            continue;
        }
        let mut x = vec![0.0; n];
        for i in rng.sample_indices(n, k) {
            x[i] = rng.gaussian();
        }
        let clean = a.matvec(&x).unwrap();
        let nu: Vec<f64> = rng.gaussian_vec(m).iter().map(|v| 1e-3 * v).collect();
        for noisy in [false, true] {
            let (y, noise) = if noisy {
                (clean.iter().zip(&nu).map(|(p, q)| p + q).collect(), Some(nu.clone()))
            } else {
                (clean.clone(), None)
            };
            let problem = RecoveryProblem::with_truth(a.clone(), y, k, Some(x.clone()), noise).unwrap();
            let cfg = AlgoConfig {
                gamma,
                beta,
                mean_function: spec.clone(),
                record_debug: true,
                ..if noisy { AlgoConfig::noisy() } else { AlgoConfig::default() }
            };
            let trace = dtam(&problem, &cfg).map_err(|e| e.to_string())?;
            let xs = &trace.debug.as_ref().unwrap().xs;
            for c in check_error_bound(&problem, xs, &constants).map_err(|e| e.to_string())? {
                ensure(c.observed <= c.bound + 1e-12, || {
                    format!(
                        "instance {instances} (noisy={noisy}), p={}: {} > {}",
                        c.p, c.observed, c.bound
                    )
                })?;
                if c.bound > 0.0 {
                    tightest = tightest.max(c.observed / c.bound);
                }
                checks += 1;
            }
        }
        instances += 1;
    }
    Ok(format!(
        "20 instances × (noiseless, noisy), {checks} iterate checks, max observed/bound {tightest:.3}"
    ))
}

// 10 -----------------------------------------------------------------------------

fn wavelet_demo() -> Outcome {
    let mut rng = SplitMix64::new(1010);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let family = if i % 2 == 0 { WaveletFamily::Db2 } else { WaveletFamily::Haar };
        let spec = WaveletSpec::new(family, 1 + i % 5);
        let s = rng.gaussian_vec(256);
        let back = idwt(&dwt(&s, &spec).unwrap(), &spec).unwrap();
        worst = back.iter().zip(&s).fold(worst, |m, (p, q)| m.max((p - q).abs()));
    }
    ensure(worst <= 1e-12, || format!("round-trip error {worst:e}"))?;

    let sparse = DemoConfig {
        kappa: 0.5,
        signal: SignalKind::SparseCoefficients,
        ..DemoConfig::default()
    };
    let r = signal_demo(&sparse).map_err(|e| e.to_string())?;
    ensure(r.snr_db.is_infinite(), || format!("sparse demo SNR {}", r.snr_db))?;

    let mut means = Vec::new();
    for kappa in [0.35, 0.4, 0.5] {
        let mut total = 0.0;
        for seed in 0..10 {
            let cfg = DemoConfig {
                kappa,
                seed,
                ..DemoConfig::default()
            };
            total += signal_demo(&cfg).map_err(|e| e.to_string())?.snr_db;
        }
        means.push(total / 10.0);
    }
    ensure(means.windows(2).all(|w| w[1] >= w[0]), || format!("mean SNR not monotone: {means:?}"))?;
    Ok(format!(
        "round trip {worst:.1e}; sparse demo SNR inf; mean SNR {:.2} / {:.2} / {:.2} dB at κ = 0.35 / 0.4 / 0.5",
        means[0], means[1], means[2]
    ))
}

fn run(id: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => {
            println!("criterion {id:>2} PASS  {name} ({secs:.1}s): {detail}");
            true
        }
        Err(detail) => {
            println!("criterion {id:>2} FAIL  {name} ({secs:.1}s): {detail}");
            false
        }
    }
}

fn main() {
    // Keep panic messages out of the summary lines.
    std::panic::set_hook(Box::new(|_| {}));
    let mut first_run = None;
    let results = [
        run(1, "delta-star root", delta_star),
        run(2, "g(gamma) for the l2 mean", g_gamma_identity),
        run(3, "QP oracle equivalence", qp_oracle_equivalence),
        run(4, "RIC correctness", ric_correctness),
        run(5, "lemma-level oracles", lemma_oracles),
        run(6, "DTAM invariants", dtam_invariants),
        run(7, "scaled phase transition", || phase_transition_shape(&mut first_run)),
        run(8, "error-bound validation", error_bound_validation),
        run(9, "determinism", || determinism(&first_run)),
        run(10, "wavelet demo", wavelet_demo),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
