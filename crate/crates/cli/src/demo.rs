//! Wavelet-domain recovery of a 1-D test signal measured through a Gaussian matrix.
//!
//! The signal `d` is sparse (or compressible) in an orthonormal wavelet basis
//! `d = Φᵀ x`; measuring `y = B d` equals measuring `x` through `A = B Φᵀ`. The
//! solver recovers `x̂` from `(A, y, k)` and the report gives the SNR of `d̂ = Φᵀ x̂`.

use dtam_core::linalg::qr::orthonormalize;
use dtam_core::matrix::normalize_columns;
use dtam_core::rng::SplitMix64;
use dtam_core::transforms::{idwt, synthesis_sensing_matrix, WaveletFamily, WaveletSpec};
use dtam_core::{solve, AlgoConfig, Algorithm, DenseMatrix, RecoveryProblem};

use crate::error::{CliError, CliResult};
use crate::metrics::snr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalKind {
    /// Smooth pieces separated by jumps; compressible, not sparse.
    PiecewiseSmooth,
    /// `Φᵀ x` with `x` exactly `k`-sparse (Gaussian values at random positions).
    SparseCoefficients,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoConfig {
    pub n: usize,
    /// Measurement ratio; `m = ⌈κ n⌉` and `k = ⌈0.3 m⌉`.
    pub kappa: f64,
    pub wavelet: WaveletSpec,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub signal: SignalKind,
    /// Square orthonormal `B` and `k = n`: recovery must be exact (a self-check).
    pub orthonormal_debug: bool,
    pub algo_config: AlgoConfig,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            n: 256,
            kappa: 0.5,
            wavelet: WaveletSpec::new(WaveletFamily::Db2, 4),
            algorithm: Algorithm::Dtam,
            seed: 7,
            signal: SignalKind::PiecewiseSmooth,
            orthonormal_debug: false,
            algo_config: AlgoConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub algorithm: Algorithm,
    pub signal_kind: SignalKind,
    pub snr_db: f64,
    pub iterations: usize,
    pub signal: Vec<f64>,
    pub reconstruction: Vec<f64>,
}

impl std::fmt::Display for DemoReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.signal_kind {
            SignalKind::PiecewiseSmooth => {
                writeln!(f, "# synthetic piecewise-smooth test signal (no recorded audio is used)")?
            }
            SignalKind::SparseCoefficients => writeln!(f, "# signal with exactly k nonzero wavelet coefficients")?,
        }
        writeln!(f, "algorithm  {}", self.algorithm)?;
        writeln!(f, "n          {}", self.n)?;
        writeln!(f, "m          {}", self.m)?;
        writeln!(f, "k          {}", self.k)?;
        writeln!(f, "iterations {}", self.iterations)?;
        write!(f, "snr_db     {}", crate::metrics::format_db(self.snr_db))
    }
}

/// Deterministic test signal on `[0, 1)`: a chirp-like smooth part, two jumps and a
/// ramp.
pub fn piecewise_smooth(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let smooth = (2.0 * std::f64::consts::PI * (3.0 * t + 4.0 * t * t)).sin();
            let jumps = if t < 0.3 {
                0.0
            } else if t < 0.62 {
                1.2
            } else {
                -0.6
            };
            let ramp = if t > 0.8 { 4.0 * (t - 0.8) } else { 0.0 };
            smooth + jumps + ramp
        })
        .collect()
}

pub fn measurement_count(n: usize, kappa: f64) -> usize {
    ((kappa * n as f64).ceil() as usize).clamp(1, n)
}

pub fn sparsity_level(m: usize) -> usize {
    ((0.3 * m as f64).ceil() as usize).max(1)
}

pub fn signal_demo(config: &DemoConfig) -> CliResult<DemoReport> {
    if !(config.kappa > 0.0 && config.kappa <= 1.0) {
        return Err(CliError::Config(format!("kappa must lie in (0, 1], got {}", config.kappa)));
    }
    config.wavelet.check_length(config.n)?;
    let n = config.n;
    let (m, k) = if config.orthonormal_debug {
        (n, n)
    } else {
        let m = measurement_count(n, config.kappa);
        (m, sparsity_level(m))
    };

    let mut rng = SplitMix64::new(config.seed);
    let bhat = DenseMatrix::new(m, n, rng.gaussian_vec(m * n))?;
    let b = if config.orthonormal_debug {
        orthonormalize(&bhat)
    } else {
        normalize_columns(&bhat)?
    };
    let d = match config.signal {
        SignalKind::PiecewiseSmooth => piecewise_smooth(n),
        SignalKind::SparseCoefficients => {
            let mut x = vec![0.0; n];
            for i in rng.sample_indices(n, k) {
                x[i] = rng.gaussian();
            }
            idwt(&x, &config.wavelet)?
        }
    };
    let y = b.matvec(&d)?;
    let a = synthesis_sensing_matrix(&b, &config.wavelet)?;
    let problem = RecoveryProblem::new(a, y, k)?;
    let trace = solve(config.algorithm, &problem, &config.algo_config)?;
    let reconstruction = idwt(&trace.final_x, &config.wavelet)?;
    Ok(DemoReport {
        n,
        m,
        k,
        algorithm: config.algorithm,
        signal_kind: config.signal,
        snr_db: snr(&d, &reconstruction)?,
        iterations: trace.iterations(),
        signal: d,
        reconstruction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(measurement_count(256, 0.35), 90);
        assert_eq!(sparsity_level(90), 27);
        assert_eq!(measurement_count(10, 1.0), 10);
    }

    #[test]
    fn orthonormal_debug_is_exact() {
        let cfg = DemoConfig {
            n: 64,
            kappa: 1.0,
            orthonormal_debug: true,
            ..DemoConfig::default()
        };
        let r = signal_demo(&cfg).unwrap();
        assert_eq!(r.snr_db, f64::INFINITY);
    }

    #[test]
    fn bad_kappa() {
        let cfg = DemoConfig {
            kappa: 0.0,
            ..DemoConfig::default()
        };
        assert!(matches!(signal_demo(&cfg), Err(CliError::Config(_))));
    }
}
