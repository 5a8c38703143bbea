//! Generalized mean functions `Γ_θ(z) = Ψ^{-1}(Σ θ_i φ(z_i))`, the shifted score
//! `f(z) = Γ_θ(z) - Γ_θ(0)`, the constant `g(γ)` that lower-bounds the energy kept by
//! the dynamic selection rule, and the rule itself.
//!
//! Built-in families (all accept `z ∈ [0, 1]^k`):
//!
//! | family        | `φ(t)`                 | `Ψ^{-1}(s)`          |
//! |---------------|------------------------|----------------------|
//! | `LogSumExp`   | `exp(t / σ)`           | `σ ln s`             |
//! | `Power`       | `(t + σ)^l`            | `s^{1/l} - σ`        |
//! | `Delta11`     | `Δ11(t + σ)`           | `s^{1/l} - σ`        |
//! | `Delta12`     | `Δ12(t + σ)`           | `s^{1/l} - σ`        |
//! | `LpNorm`      | `t^l`                  | `s^{1/l}`            |
//!
//! with `Δ11(t) = t²/2 - t + ln(t + 1)` and `Δ12(t) = ((t + 1)² - (t + 1)^{-1} - 3t) / 2`.
//! `LpNorm` is the weighted ℓ_l norm; it is not differentiable at 0 and gets its own
//! treatment in [`g_gamma`].

use crate::error::{Error, Result};
use crate::linalg::eigen::sym_eigenvalues;
use crate::linalg::{ranked_top_k, SupportSet};
use crate::matrix::{norm2, DenseMatrix};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanFamily {
    LogSumExp,
    Power,
    Delta11,
    Delta12,
    LpNorm,
}

impl MeanFamily {
    pub fn name(self) -> &'static str {
        match self {
            MeanFamily::LogSumExp => "log_sum_exp",
            MeanFamily::Power => "power",
            MeanFamily::Delta11 => "delta11",
            MeanFamily::Delta12 => "delta12",
            MeanFamily::LpNorm => "lp_norm",
        }
    }
}

impl std::str::FromStr for MeanFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log_sum_exp" | "lse" => Ok(MeanFamily::LogSumExp),
            "power" => Ok(MeanFamily::Power),
            "delta11" => Ok(MeanFamily::Delta11),
            "delta12" => Ok(MeanFamily::Delta12),
            "lp_norm" | "lp" => Ok(MeanFamily::LpNorm),
            other => Err(Error::Parse(format!("unknown mean function family `{other}`"))),
        }
    }
}

/// Weight vector θ. `Uniform` means all ones at whatever length is asked for.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Uniform,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFunctionSpec {
    pub family: MeanFamily,
    pub weights: Weights,
    /// Shift σ > 0 (unused by `LpNorm`).
    pub sigma: f64,
    /// Exponent `l` (unused by `LogSumExp`).
    pub l: f64,
}

impl Default for MeanFunctionSpec {
    fn default() -> Self {
        Self::log_sum_exp(1.0)
    }
}

impl MeanFunctionSpec {
    pub fn log_sum_exp(sigma: f64) -> Self {
        Self {
            family: MeanFamily::LogSumExp,
            weights: Weights::Uniform,
            sigma,
            l: 1.0,
        }
    }

    pub fn power(sigma: f64, l: f64) -> Self {
        Self {
            family: MeanFamily::Power,
            weights: Weights::Uniform,
            sigma,
            l,
        }
    }

    pub fn delta11(sigma: f64, l: f64) -> Self {
        Self {
            family: MeanFamily::Delta11,
            weights: Weights::Uniform,
            sigma,
            l,
        }
    }

    pub fn delta12(sigma: f64, l: f64) -> Self {
        Self {
            family: MeanFamily::Delta12,
            weights: Weights::Uniform,
            sigma,
            l,
        }
    }

    pub fn lp_norm(l: f64) -> Self {
        Self {
            family: MeanFamily::LpNorm,
            weights: Weights::Uniform,
            sigma: 1.0,
            l,
        }
    }

    pub fn with_theta(mut self, theta: Vec<f64>) -> Self {
        self.weights = Weights::Explicit(theta);
        self
    }

    /// Check parameter ranges and, when weights are explicit, that they have length `k`.
    pub fn validate(&self, k: usize) -> Result<()> {
        if let Weights::Explicit(theta) = &self.weights {
            if theta.len() != k {
                return Err(Error::Dimension(format!(
                    "theta has length {} but k = {k}",
                    theta.len()
                )));
            }
            if theta.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
                return Err(Error::InvalidArgument("theta must be strictly positive".into()));
            }
        }
        let l = self.l;
        match self.family {
            MeanFamily::LogSumExp => {}
            MeanFamily::Power if !(l > 1.0 && l.is_finite()) => {
                return Err(Error::InvalidArgument(format!("power family needs l > 1, got {l}")))
            }
            MeanFamily::Delta11 | MeanFamily::Delta12 if !(l > 1.0 && l <= 2.0) => {
                return Err(Error::InvalidArgument(format!(
                    "delta families need 1 < l <= 2, got {l}"
                )))
            }
            MeanFamily::LpNorm if !(l > 1.0 && l.is_finite()) => {
                return Err(Error::InvalidArgument(format!("lp_norm needs l > 1, got {l}")))
            }
            _ => {}
        }
        if self.family != MeanFamily::LpNorm && !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    #[inline]
    fn theta(&self, i: usize) -> f64 {
        match &self.weights {
            Weights::Uniform => 1.0,
            Weights::Explicit(t) => t[i],
        }
    }

    fn theta_range(&self, k: usize) -> (f64, f64) {
        (0..k).fold((f64::INFINITY, 0.0f64), |(lo, hi), i| {
            let t = self.theta(i);
            (lo.min(t), hi.max(t))
        })
    }

    /// Lower end of the open domain interval of each coordinate.
    fn domain_floor(&self) -> f64 {
        match self.family {
            MeanFamily::LogSumExp => f64::NEG_INFINITY,
            MeanFamily::Power | MeanFamily::Delta11 | MeanFamily::Delta12 => -self.sigma,
            MeanFamily::LpNorm => 0.0,
        }
    }

    fn check_point(&self, z: &[f64]) -> Result<()> {
        self.validate(z.len())?;
        let floor = self.domain_floor();
        let closed = self.family == MeanFamily::LpNorm;
        for (i, &zi) in z.iter().enumerate() {
            let ok = zi.is_finite() && if closed { zi >= floor } else { zi > floor };
            if !ok {
                return Err(Error::Domain(format!(
                    "z[{i}] = {zi} outside the domain of the {} family",
                    self.family.name()
                )));
            }
        }
        Ok(())
    }

    /// Inner function φ and its first two derivatives at `t`.
    fn phi(&self, t: f64) -> (f64, f64, f64) {
        let (s, l) = (self.sigma, self.l);
        match self.family {
            MeanFamily::LogSumExp => {
                let e = (t / s).exp();
                (e, e / s, e / (s * s))
            }
            MeanFamily::Power => {
                let b = t + s;
                (b.powf(l), l * b.powf(l - 1.0), l * (l - 1.0) * b.powf(l - 2.0))
            }
            MeanFamily::Delta11 => {
                let h = t + s;
                let v = h * h / 2.0 - h + (h + 1.0).ln();
                let d1 = h - 1.0 + 1.0 / (h + 1.0);
                let d2 = 1.0 - 1.0 / ((h + 1.0) * (h + 1.0));
                (v, d1, d2)
            }
            MeanFamily::Delta12 => {
                let h = t + s;
                let p = h + 1.0;
                let v = 0.5 * (p * p - 1.0 / p - 3.0 * h);
                let d1 = 0.5 * (2.0 * p + 1.0 / (p * p) - 3.0);
                let d2 = 0.5 * (2.0 - 2.0 / (p * p * p));
                (v, d1, d2)
            }
            MeanFamily::LpNorm => (t.powf(l), l * t.powf(l - 1.0), l * (l - 1.0) * t.powf(l - 2.0)),
        }
    }

    /// Outer inverse `h = Ψ^{-1}` and its first two derivatives at `s > 0`.
    fn outer(&self, s: f64) -> (f64, f64, f64) {
        match self.family {
            MeanFamily::LogSumExp => {
                let sg = self.sigma;
                (sg * s.ln(), sg / s, -sg / (s * s))
            }
            MeanFamily::LpNorm => {
                let a = 1.0 / self.l;
                (s.powf(a), a * s.powf(a - 1.0), a * (a - 1.0) * s.powf(a - 2.0))
            }
            _ => {
                let a = 1.0 / self.l;
                (
                    s.powf(a) - self.sigma,
                    a * s.powf(a - 1.0),
                    a * (a - 1.0) * s.powf(a - 2.0),
                )
            }
        }
    }

    fn inner_sum(&self, z: &[f64]) -> f64 {
        z.iter().enumerate().map(|(i, &zi)| self.theta(i) * self.phi(zi).0).sum()
    }

    /// `Γ_θ(z)`.
    pub fn gamma_value(&self, z: &[f64]) -> Result<f64> {
        self.check_point(z)?;
        Ok(self.outer(self.inner_sum(z)).0)
    }

    /// Hessian of `f` at an interior point of the domain (families other than `LpNorm`).
    pub fn hessian(&self, z: &[f64]) -> Result<DenseMatrix> {
        self.check_point(z)?;
        if self.family == MeanFamily::LpNorm {
            return Err(Error::Domain("lp_norm has no Hessian at 0".into()));
        }
        let k = z.len();
        let (_, h1, h2) = self.outer(self.inner_sum(z));
        let parts: Vec<(f64, f64)> = z
            .iter()
            .enumerate()
            .map(|(i, &zi)| {
                let (_, d1, d2) = self.phi(zi);
                (self.theta(i) * d1, self.theta(i) * d2)
            })
            .collect();
        let mut data = vec![0.0; k * k];
        for j in 0..k {
            for i in 0..k {
                let mut v = h2 * parts[i].0 * parts[j].0;
                if i == j {
                    v += h1 * parts[i].1;
                }
                data[j * k + i] = v;
            }
        }
        DenseMatrix::new(k, k, data)
    }
}

/// `f(z) = Γ_θ(z) - Γ_θ(0)`; exactly zero at `z = 0`.
pub fn eval_f(spec: &MeanFunctionSpec, z: &[f64]) -> Result<f64> {
    spec.check_point(z)?;
    if z.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    if spec.family == MeanFamily::LpNorm {
        return Ok(spec.outer(spec.inner_sum(z)).0);
    }
    let zero = vec![0.0; z.len()];
    Ok(spec.outer(spec.inner_sum(z)).0 - spec.outer(spec.inner_sum(&zero)).0)
}

/// `∇f(0)` for a `k`-dimensional argument. Not defined for `LpNorm`.
pub fn grad_f_at_zero(spec: &MeanFunctionSpec, k: usize) -> Result<Vec<f64>> {
    if spec.family == MeanFamily::LpNorm {
        return Err(Error::Domain("the gradient of a norm is undefined at 0".into()));
    }
    let zero = vec![0.0; k];
    spec.check_point(&zero)?;
    let (_, h1, _) = spec.outer(spec.inner_sum(&zero));
    let d1 = spec.phi(0.0).1;
    Ok((0..k).map(|i| h1 * spec.theta(i) * d1).collect())
}

/// Largest eigenvalue of `∇²f(z)`.
pub fn hessian_lambda_max(spec: &MeanFunctionSpec, z: &[f64]) -> Result<f64> {
    let ev = sym_eigenvalues(&spec.hessian(z)?);
    Ok(*ev.last().expect("k >= 1"))
}

/// Safety factor applied to the maximised Hessian eigenvalue.
pub const LAMBDA_SAFETY: f64 = 1.05;
/// Corners of `[0, 1]^k` are enumerated only up to this `k`.
pub const MAX_CORNER_DIM: usize = 10;

/// Number of best-scoring starts refined by pattern search in [`lambda_star`].
pub const REFINED_STARTS: usize = 8;

/// Upper estimate of `λ* = max_{z ∈ [0,1]^k} λ_max(∇²f(z))`.
///
/// Candidate starts are every corner (when `k <= 10`), the centre, and `samples`
/// uniform random points drawn from `seed`. Each is evaluated once; pattern search
/// then refines the [`REFINED_STARTS`] best. The best value found is scaled by
/// [`LAMBDA_SAFETY`].
pub fn lambda_star(spec: &MeanFunctionSpec, k: usize, samples: usize, seed: u64) -> Result<f64> {
    if spec.family == MeanFamily::LpNorm {
        return Err(Error::Domain("lp_norm is not twice differentiable at 0".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    spec.validate(k)?;
    let mut starts: Vec<Vec<f64>> = Vec::new();
    if k <= MAX_CORNER_DIM {
        for mask in 0u32..(1u32 << k) {
            starts.push((0..k).map(|i| ((mask >> i) & 1) as f64).collect());
        }
    }
    starts.push(vec![0.5; k]);
    let mut rng = SplitMix64::new(seed);
    for _ in 0..samples {
        starts.push((0..k).map(|_| rng.uniform()).collect());
    }
    let mut scored = Vec::with_capacity(starts.len());
    for start in starts {
        scored.push((hessian_lambda_max(spec, &start)?, start));
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = 0.0f64;
    for (_, start) in scored.into_iter().take(REFINED_STARTS) {
        best = best.max(pattern_search_max(spec, start)?);
    }
    Ok(LAMBDA_SAFETY * best)
}

/// Coordinate pattern search for `max λ_max(∇²f(z))` over the unit box.
fn pattern_search_max(spec: &MeanFunctionSpec, mut z: Vec<f64>) -> Result<f64> {
    let k = z.len();
    let mut val = hessian_lambda_max(spec, &z)?;
    let mut step = 0.25;
    let mut evals = 0usize;
    let budget = 200 * k.max(1);
    while step > 1e-6 && evals < budget {
        let mut improved = false;
        for i in 0..k {
            for dir in [1.0, -1.0] {
                let cand = (z[i] + dir * step).clamp(0.0, 1.0);
                if cand == z[i] {
                    continue;
                }
                let old = z[i];
                z[i] = cand;
                let v = hessian_lambda_max(spec, &z)?;
                evals += 1;
                if v > val {
                    val = v;
                    improved = true;
                } else {
                    z[i] = old;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(val.max(0.0))
}

/// Ingredients and value of `g(γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GGammaBundle {
    /// `min_i ∂f/∂z_i(0)`; for `LpNorm` the lower norm-equivalence constant `c1`.
    pub c: f64,
    /// `||∇f(0)||_2`; for `LpNorm` the upper norm-equivalence constant `c2`.
    pub grad_norm: f64,
    pub lambda_star: f64,
    pub g: f64,
}

/// Default number of random starts used by [`g_gamma`] when estimating `λ*`.
pub const DEFAULT_LAMBDA_SAMPLES: usize = 64;

/// `g(γ) = 2γc / (sqrt(||∇f(0)||² + 2γcλ*) + ||∇f(0)||)`, or `γc/||∇f(0)||` when `λ* = 0`.
///
/// For `LpNorm` with weights θ, `c1 ||z||_2 <= ||z||_{l,θ} <= c2 ||z||_2` on `R^k` and
/// `g = γ c1 / c2` (exactly `γ` for the unweighted ℓ2 norm).
pub fn g_gamma(spec: &MeanFunctionSpec, k: usize, gamma: f64, seed: u64) -> Result<GGammaBundle> {
    g_gamma_with_samples(spec, k, gamma, DEFAULT_LAMBDA_SAMPLES, seed)
}

pub fn g_gamma_with_samples(
    spec: &MeanFunctionSpec,
    k: usize,
    gamma: f64,
    samples: usize,
    seed: u64,
) -> Result<GGammaBundle> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    spec.validate(k)?;
    if spec.family == MeanFamily::LpNorm {
        let (c1, c2) = lp_norm_equivalence(spec, k);
        return Ok(GGammaBundle {
            c: c1,
            grad_norm: c2,
            lambda_star: 0.0,
            g: if c1 == c2 { gamma } else { gamma * c1 / c2 },
        });
    }
    let grad = grad_f_at_zero(spec, k)?;
    let c = grad.iter().copied().fold(f64::INFINITY, f64::min);
    let grad_norm = norm2(&grad);
    let lam = lambda_star(spec, k, samples, seed)?;
    let g = if lam == 0.0 {
        gamma * c / grad_norm
    } else {
        2.0 * gamma * c / ((grad_norm * grad_norm + 2.0 * gamma * c * lam).sqrt() + grad_norm)
    };
    Ok(GGammaBundle {
        c,
        grad_norm,
        lambda_star: lam,
        g,
    })
}

/// Constants with `c1 ||z||_2 <= (Σ θ_i |z_i|^l)^{1/l} <= c2 ||z||_2` on `R^k`.
fn lp_norm_equivalence(spec: &MeanFunctionSpec, k: usize) -> (f64, f64) {
    let l = spec.l;
    let (tmin, tmax) = spec.theta_range(k);
    let (w_lo, w_hi) = (tmin.powf(1.0 / l), tmax.powf(1.0 / l));
    if l == 2.0 {
        return (w_lo, w_hi);
    }
    let spread = (k as f64).powf((1.0 / l - 0.5).abs());
    if l > 2.0 {
        // ||z||_l <= ||z||_2 <= k^{1/2-1/l} ||z||_l
        (w_lo / spread, w_hi)
    } else {
        // ||z||_2 <= ||z||_l <= k^{1/l-1/2} ||z||_2
        (w_lo, w_hi * spread)
    }
}

/// Outcome of the dynamic index selection rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub q: usize,
    /// Indices of the `q` largest-magnitude entries.
    pub omega_q: SupportSet,
    /// Indices of the `k` largest-magnitude entries.
    pub omega_k: SupportSet,
}

/// Smallest `q` in `1..=k` with `f(|r_(q,k)| / ||r_(k,k)||) >= γ f(|r_(k,k)| / ||r_(k,k)||)`.
///
/// `r_(i,k)` lists the top-k magnitudes of `r` in decreasing order with positions
/// after `i` zeroed, so the largest weight θ_1 pairs with the largest magnitude.
pub fn select_q(r: &[f64], k: usize, gamma: f64, spec: &MeanFunctionSpec) -> Result<Selection> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    let ranked = ranked_top_k(r, k)?;
    let mags: Vec<f64> = ranked.iter().map(|&i| r[i].abs()).collect();
    let norm = norm2(&mags);
    if norm == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let full: Vec<f64> = mags.iter().map(|m| m / norm).collect();
    let target = gamma * eval_f(spec, &full)?;
    let mut z = vec![0.0; k];
    let mut q = k;
    for i in 0..k {
        z[i] = full[i];
        if eval_f(spec, &z)? >= target {
            q = i + 1;
            break;
        }
    }
    Ok(Selection {
        q,
        omega_q: SupportSet::from_indices(ranked[..q].to_vec()),
        omega_k: SupportSet::from_indices(ranked),
    })
}
