//! Monte Carlo phase-transition sweeps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use dtam_core::rng::derive_seed;
use dtam_core::{solve, AlgoConfig, Algorithm};

use crate::error::{CliError, CliResult};
use crate::instance::gen_noisy_instance;

/// Relative error at or below which a noiseless trial counts as a success.
pub const SUCCESS_TOL: f64 = 1e-3;

pub const ROWS_HEADER: &str = "algorithm,k,trial,seed,success,rel_error,iterations,time_ms";
pub const AGGREGATE_HEADER: &str = "algorithm,k,trials,success_freq,mean_time_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m: usize,
    pub k_grid: Vec<usize>,
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    pub base_seed: u64,
    pub algo_config: AlgoConfig,
    /// Per-trial rows; aggregates go next to it with an `_aggregate` suffix.
    pub output_path: PathBuf,
    /// Standard deviation of additive Gaussian noise; 0 for noiseless runs.
    pub noise_std: f64,
    /// When false, `time_ms` is written as 0 so repeated runs give identical files.
    pub record_timing: bool,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 400,
            m: 80,
            k_grid: (1..=15).map(|j| 5 * j).collect(),
            trials: 50,
            algorithms: Algorithm::ALL.to_vec(),
            base_seed: 20_240_601,
            algo_config: AlgoConfig::default(),
            output_path: PathBuf::from("phase_transition.csv"),
            noise_std: 0.0,
            record_timing: true,
            threads: None,
        }
    }
}

impl ExperimentConfig {
    /// The full-size protocol: `n = 4000`, `m = 800`, `k = 5, 10, ..., 400`, 100 trials.
    pub fn full_scale() -> Self {
        Self {
            n: 4000,
            m: 800,
            k_grid: (1..=80).map(|j| 5 * j).collect(),
            trials: 100,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(self.m < self.n) {
            return Err(CliError::Config(format!("need m < n, got m={} n={}", self.m, self.n)));
        }
        if let Some(&k) = self.k_grid.iter().find(|&&k| k == 0 || k > self.m) {
            return Err(CliError::Config(format!("sparsity {k} must lie in 1..={}", self.m)));
        }
        if self.algorithms.is_empty() {
            return Err(CliError::Config("no algorithms selected".into()));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(CliError::Config("noise_std must be nonnegative".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be positive".into()));
        }
        self.algo_config.validate()?;
        Ok(())
    }

    pub fn noisy(&self) -> bool {
        self.noise_std > 0.0
    }

    pub fn aggregate_path(&self) -> PathBuf {
        sibling_path(&self.output_path, "_aggregate")
    }
}

fn sibling_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}{suffix}"),
    };
    path.with_file_name(name)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub algorithm: Algorithm,
    pub k: usize,
    pub trial: usize,
    pub seed: u64,
    /// `None` for noisy runs.
    pub success: Option<bool>,
    pub rel_error: f64,
    pub iterations: usize,
    pub time_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellAggregate {
    pub algorithm: Algorithm,
    pub k: usize,
    pub trials: usize,
    /// `None` for noisy runs.
    pub success_freq: Option<f64>,
    pub mean_time_ms: f64,
}

/// Seed of one trial: the base seed mixed with the algorithm index, `k` and the trial
/// index through [`derive_seed`].
pub fn trial_seed(base: u64, algorithm: Algorithm, k: usize, trial: usize) -> u64 {
    derive_seed(base, &[algorithm.index() as u64, k as u64, trial as u64])
}

pub fn run_trial(config: &ExperimentConfig, algorithm: Algorithm, k: usize, trial: usize) -> CliResult<TrialResult> {
    let seed = trial_seed(config.base_seed, algorithm, k, trial);
    let problem = gen_noisy_instance(config.n, config.m, k, config.noise_std, seed)?;
    let start = Instant::now();
    let trace = solve(algorithm, &problem, &config.algo_config)?;
    let elapsed = start.elapsed();
    let rel_error = problem.relative_error(&trace.final_x).expect("generated with ground truth");
    Ok(TrialResult {
        algorithm,
        k,
        trial,
        seed,
        success: (!config.noisy()).then_some(rel_error <= SUCCESS_TOL),
        rel_error,
        iterations: trace.iterations(),
        time_ms: if config.record_timing {
            elapsed.as_secs_f64() * 1e3
        } else {
            0.0
        },
    })
}

/// Runs every `(algorithm, k, trial)` cell, in parallel, and returns the rows sorted
/// by algorithm, `k`, trial.
pub fn run_trials(config: &ExperimentConfig) -> CliResult<Vec<TrialResult>> {
    config.validate()?;
    let jobs: Vec<(Algorithm, usize, usize)> = config
        .algorithms
        .iter()
        .flat_map(|&a| config.k_grid.iter().flat_map(move |&k| (0..config.trials).map(move |t| (a, k, t))))
        .collect();
    let work = || -> CliResult<Vec<TrialResult>> {
        jobs.par_iter().map(|&(a, k, t)| run_trial(config, a, k, t)).collect()
    };
    let mut rows = match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    rows.sort_by_key(|r| (r.algorithm, r.k, r.trial));
    Ok(rows)
}

/// Per-(algorithm, k) summaries of sorted rows, in row order.
pub fn aggregate(rows: &[TrialResult]) -> Vec<CellAggregate> {
    let mut out: Vec<CellAggregate> = Vec::new();
    for chunk in rows.chunk_by(|a, b| (a.algorithm, a.k) == (b.algorithm, b.k)) {
        let trials = chunk.len();
        let success_freq = chunk
            .iter()
            .map(|r| r.success.map(|s| s as usize))
            .sum::<Option<usize>>()
            .map(|s| s as f64 / trials as f64);
        let mean_time_ms = chunk.iter().map(|r| r.time_ms).sum::<f64>() / trials as f64;
        out.push(CellAggregate {
            algorithm: chunk[0].algorithm,
            k: chunk[0].k,
            trials,
            success_freq,
            mean_time_ms,
        });
    }
    out
}

fn opt_bool(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "1",
        Some(false) => "0",
        None => "",
    }
}

pub fn rows_csv(rows: &[TrialResult]) -> String {
    let mut out = String::from(ROWS_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{:e},{},{:.3}",
            r.algorithm,
            r.k,
            r.trial,
            r.seed,
            opt_bool(r.success),
            r.rel_error,
            r.iterations,
            r.time_ms
        )
        .expect("writing to a String");
    }
    out
}

pub fn aggregate_csv(cells: &[CellAggregate]) -> String {
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    for c in cells {
        let freq = c.success_freq.map(|f| format!("{f:.4}")).unwrap_or_default();
        writeln!(out, "{},{},{},{},{:.3}", c.algorithm, c.k, c.trials, freq, c.mean_time_ms)
            .expect("writing to a String");
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTransition {
    pub rows: Vec<TrialResult>,
    pub cells: Vec<CellAggregate>,
}

impl PhaseTransition {
    pub fn success_freq(&self, algorithm: Algorithm, k: usize) -> Option<f64> {
        self.cells
            .iter()
            .find(|c| c.algorithm == algorithm && c.k == k)
            .and_then(|c| c.success_freq)
    }
}

/// Runs the sweep and writes the rows and aggregate CSV files.
pub fn phase_transition(config: &ExperimentConfig) -> CliResult<PhaseTransition> {
    let rows = run_trials(config)?;
    let cells = aggregate(&rows);
    write_file(&config.output_path, &rows_csv(&rows))?;
    write_file(&config.aggregate_path(), &aggregate_csv(&cells))?;
    Ok(PhaseTransition { rows, cells })
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Numeric(dtam_core::Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
