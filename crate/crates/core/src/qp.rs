//! The weight subproblem `min ||y - A(u ∘ w)||²` over the capped simplex
//! `{0 <= w <= 1, Σw = k}` (or `Σw <= k`), solved by accelerated projected gradient.

use crate::error::{Error, Result};
use crate::linalg::SupportSet;
use crate::matrix::{dot, norm2, norm_inf, DenseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMode {
    Equality,
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CappedSimplexSpec {
    pub dim: usize,
    pub mass: f64,
    pub sum_mode: SumMode,
}

impl CappedSimplexSpec {
    pub fn new(dim: usize, mass: usize, sum_mode: SumMode) -> Self {
        Self {
            dim,
            mass: mass as f64,
            sum_mode,
        }
    }

    pub fn check_feasible(&self) -> Result<()> {
        if !(self.mass > 0.0) {
            return Err(Error::Infeasible(format!("mass must be positive, got {}", self.mass)));
        }
        if self.sum_mode == SumMode::Equality && self.mass > self.dim as f64 {
            return Err(Error::Infeasible(format!(
                "mass {} exceeds dimension {} in equality mode",
                self.mass, self.dim
            )));
        }
        Ok(())
    }

    /// The uniform feasible point `min(1, k/d) · 1`.
    pub fn uniform_point(&self) -> Vec<f64> {
        vec![(self.mass / self.dim as f64).min(1.0); self.dim]
    }
}

/// Euclidean projection onto the capped simplex.
pub fn project_capped_simplex(v: &[f64], spec: &CappedSimplexSpec) -> Result<Vec<f64>> {
    spec.check_feasible()?;
    if v.len() != spec.dim {
        return Err(Error::Dimension(format!(
            "vector of length {} for a {}-dimensional simplex",
            v.len(),
            spec.dim
        )));
    }
    let mut out = vec![0.0; v.len()];
    project_into(v, spec, &mut out);
    Ok(out)
}

/// Solve `Σ clamp(v_i - τ, 0, 1) = mass` for `τ` by sweeping the sorted breakpoints
/// `{v_i - 1, v_i}`; the sum is linear between consecutive breakpoints.
pub fn capped_simplex_shift(v: &[f64], mass: f64) -> f64 {
    // (breakpoint, slot): slot 0 = leaves the upper bound, slot 1 = hits zero.
    let mut events: Vec<(f64, u8, usize)> = Vec::with_capacity(2 * v.len());
    for (i, &vi) in v.iter().enumerate() {
        events.push((vi - 1.0, 0, i));
        events.push((vi, 1, i));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut n_top = v.len() as f64;
    let mut n_mid = 0.0;
    let mut sum_mid = 0.0;
    let mut prev_tau = events[0].0;
    for &(tau, slot, i) in &events {
        // Sum just before processing the events at `tau`: n_top + sum_mid - n_mid * tau.
        let h = n_top + sum_mid - n_mid * tau;
        if h <= mass {
            return if n_mid > 0.0 {
                ((n_top + sum_mid - mass) / n_mid).clamp(prev_tau, tau)
            } else {
                tau
            };
        }
        if slot == 0 {
            n_top -= 1.0;
            n_mid += 1.0;
            sum_mid += v[i];
        } else {
            n_mid -= 1.0;
            sum_mid -= v[i];
        }
        prev_tau = tau;
    }
    prev_tau
}

fn project_into(v: &[f64], spec: &CappedSimplexSpec, out: &mut [f64]) {
    if spec.sum_mode == SumMode::AtMost {
        let mut total = 0.0;
        for (o, &vi) in out.iter_mut().zip(v) {
            *o = vi.clamp(0.0, 1.0);
            total += *o;
        }
        if total <= spec.mass {
            return;
        }
    }
    let tau = capped_simplex_shift(v, spec.mass);
    for (o, &vi) in out.iter_mut().zip(v) {
        *o = (vi - tau).clamp(0.0, 1.0);
    }
}

pub const MAX_QP_ITERS: usize = 10_000;
pub const QP_KKT_TOL: f64 = 1e-8;
const POWER_ITERS: usize = 50;
const POWER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    /// Weights on the coordinates of `V`, in increasing index order.
    pub w: Vec<f64>,
    /// `||y - A(u ∘ w)||²`.
    pub objective: f64,
    pub iterations: usize,
    /// `||w - P(w - ∇F(w))||_∞`.
    pub kkt_residual: f64,
    /// Iteration cap reached before the KKT tolerance.
    pub hit_iteration_cap: bool,
    /// Objective after each accepted iterate, starting with the feasible start point.
    pub history: Vec<f64>,
}

/// Minimise `F(w) = ||y - A(u ∘ w)||²` over `w` supported on `V` with `0 <= w <= 1`
/// and `Σ w = k` (or `<= k`).
///
/// Works on the Gram form `F(w) = wᵀMw - 2bᵀw + yᵀy` with `B = A_V diag(u_V)`,
/// `M = BᵀB`, `b = Bᵀy`. Starts at the uniform feasible point, steps `1/L` with
/// `L = 2 λ_max(M)` from power iteration (doubled whenever the quadratic upper
/// bound fails), and resets momentum whenever the objective would increase, so the
/// accepted objectives never increase.
pub fn solve_w_subproblem(
    a: &DenseMatrix,
    y: &[f64],
    u: &[f64],
    v: &SupportSet,
    k: usize,
    sum_mode: SumMode,
) -> Result<QpSolution> {
    if u.len() != a.cols() || y.len() != a.rows() {
        return Err(Error::Dimension("u or y does not match A".into()));
    }
    v.check_bound(a.cols())?;
    let d = v.len();
    if d == 0 {
        return Err(Error::Infeasible("empty index set".into()));
    }
    let spec = CappedSimplexSpec::new(d, k, sum_mode);
    spec.check_feasible()?;

    let mut bcols = Vec::with_capacity(d);
    for i in v.iter() {
        bcols.push(a.col(i).iter().map(|x| x * u[i]).collect::<Vec<f64>>());
    }
    let bmat = DenseMatrix::from_columns(&bcols)?;
    let gram = bmat.gram();
    let b = bmat.matvec_t(y)?;
    let yy = dot(y, y);

    let objective = |w: &[f64]| -> f64 {
        let bw = bmat.matvec(w).expect("dimensions checked");
        bw.iter().zip(y).map(|(p, q)| (q - p) * (q - p)).sum()
    };

    let w0 = spec.uniform_point();
    let lam = power_iteration(&gram);
    if lam == 0.0 {
        let obj = objective(&w0);
        return Ok(QpSolution {
            w: w0,
            objective: obj,
            iterations: 0,
            kkt_residual: 0.0,
            hit_iteration_cap: false,
            history: vec![obj],
        });
    }

    // Mw, F and ∇F from the Gram form.
    let eval = |w: &[f64]| -> (f64, Vec<f64>) {
        let mw = gram.matvec(w).expect("dimensions checked");
        let f = dot(w, &mw) - 2.0 * dot(&b, w) + yy;
        let grad: Vec<f64> = mw.iter().zip(&b).map(|(p, q)| 2.0 * (p - q)).collect();
        (f, grad)
    };
    let kkt = |w: &[f64], grad: &[f64], scratch: &mut Vec<f64>| -> f64 {
        let step: Vec<f64> = w.iter().zip(grad).map(|(x, g)| x - g).collect();
        project_into(&step, &spec, scratch);
        w.iter().zip(scratch.iter()).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()))
    };

    let mut lip = 2.0 * lam;
    let mut w = w0;
    let (mut fw, gw0) = eval(&w);
    let tol = QP_KKT_TOL * (1.0 + norm_inf(&gw0));
    let mut history = vec![fw];
    let mut scratch = vec![0.0; d];
    let mut kkt_res = kkt(&w, &gw0, &mut scratch);
    let mut z = w.clone();
    let mut t = 1.0f64;
    let mut iterations = 0;
    let mut trial = vec![0.0; d];

    while kkt_res > tol && iterations < MAX_QP_ITERS {
        iterations += 1;
        let (fz, gz) = eval(&z);
        // Backtrack until the quadratic model at z bounds F.
        let mut f_new;
        let mut g_new;
        loop {
            let step: Vec<f64> = z.iter().zip(&gz).map(|(x, g)| x - g / lip).collect();
            project_into(&step, &spec, &mut trial);
            (f_new, g_new) = eval(&trial);
            let diff: Vec<f64> = trial.iter().zip(&z).map(|(p, q)| p - q).collect();
            let model = fz + dot(&gz, &diff) + 0.5 * lip * dot(&diff, &diff);
            if f_new <= model + 1e-12 * (1.0 + fz.abs()) {
                break;
            }
            lip *= 2.0;
        }
        if f_new > fw {
            // Momentum restart: retry from the last accepted point.
            if z == w {
                // A plain projected-gradient step cannot increase F beyond rounding.
                break;
            }
            z.clone_from(&w);
            t = 1.0;
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let mom = (t - 1.0) / t_next;
        for i in 0..d {
            z[i] = trial[i] + mom * (trial[i] - w[i]);
        }
        w.clone_from(&trial);
        fw = f_new;
        t = t_next;
        history.push(fw);
        kkt_res = kkt(&w, &g_new, &mut scratch);
    }

    Ok(QpSolution {
        objective: objective(&w),
        hit_iteration_cap: kkt_res > tol,
        w,
        iterations,
        kkt_residual: kkt_res,
        history,
    })
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix.
fn power_iteration(m: &DenseMatrix) -> f64 {
    let n = m.rows();
    // Start from the all-ones direction plus a deterministic tilt.
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * i as f64).collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut lam = 0.0;
    for _ in 0..POWER_ITERS {
        let y = m.matvec(&x).expect("square");
        let ny = norm2(&y);
        if ny == 0.0 {
            return 0.0;
        }
        let next = dot(&x, &y);
        x = y.iter().map(|v| v / ny).collect();
        let done = (next - lam).abs() <= POWER_TOL * next.abs();
        lam = next;
        if done {
            break;
        }
    }
    lam.max(0.0)
}
