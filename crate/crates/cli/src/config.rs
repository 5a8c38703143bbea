//! Flat `key = value` configuration files and `key=value` command-line overrides.
//!
//! Blank lines and lines starting with `#` are ignored. Later entries win, so
//! overrides are applied by appending them after the file's entries.

use std::path::PathBuf;
use std::str::FromStr;

use dtam_core::meanfun::{MeanFamily, MeanFunctionSpec, Weights};
use dtam_core::transforms::WaveletFamily;
use dtam_core::{AlgoConfig, Algorithm};

use crate::demo::{DemoConfig, SignalKind};
use crate::error::{CliError, CliResult};
use crate::experiment::ExperimentConfig;

pub type Settings = Vec<(String, String)>;

pub fn parse_settings(text: &str) -> CliResult<Settings> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn read_settings(path: &std::path::Path) -> CliResult<Settings> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_settings(&text)
}

/// Parses one `key=value` override.
pub fn parse_override(s: &str) -> CliResult<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{s}` is not key=value")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn bad(key: &str, value: &str) -> CliError {
    CliError::Config(format!("invalid value `{value}` for `{key}`"))
}

fn num<T: FromStr>(key: &str, value: &str) -> CliResult<T> {
    value.parse().map_err(|_| bad(key, value))
}

fn boolean(key: &str, value: &str) -> CliResult<bool> {
    match value.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(bad(key, value)),
    }
}

/// `5,10,20` or the inclusive range `start:stop:step`.
pub fn parse_usize_list(key: &str, value: &str) -> CliResult<Vec<usize>> {
    let parts: Vec<&str> = value.split(':').collect();
    if parts.len() == 3 {
        let [a, b, s] = [parts[0], parts[1], parts[2]].map(|p| num::<usize>(key, p.trim()));
        let (a, b, s) = (a?, b?, s?);
        if s == 0 {
            return Err(bad(key, value));
        }
        return Ok((a..=b).step_by(s).collect());
    }
    value.split(',').map(|p| num(key, p.trim())).collect()
}

fn f64_list(key: &str, value: &str) -> CliResult<Vec<f64>> {
    value.split(',').map(|p| num(key, p.trim())).collect()
}

pub fn parse_algorithms(value: &str) -> CliResult<Vec<Algorithm>> {
    if value.eq_ignore_ascii_case("all") {
        return Ok(Algorithm::ALL.to_vec());
    }
    value
        .split(',')
        .map(|p| Algorithm::from_str(p).map_err(|e| CliError::Config(e.to_string())))
        .collect()
}

/// Mean-function keys collected across all sources, applied once at the end.
#[derive(Debug, Default)]
struct MeanParams {
    family: Option<MeanFamily>,
    sigma: Option<f64>,
    l: Option<f64>,
    theta: Option<Vec<f64>>,
}

impl MeanParams {
    fn take(&mut self, key: &str, value: &str) -> CliResult<bool> {
        match key {
            "mean_function" => {
                self.family = Some(MeanFamily::from_str(value).map_err(|e| CliError::Config(e.to_string()))?)
            }
            "mean_sigma" => self.sigma = Some(num(key, value)?),
            "mean_l" => self.l = Some(num(key, value)?),
            "mean_theta" => self.theta = Some(f64_list(key, value)?),
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn apply(self, spec: &mut MeanFunctionSpec) {
        if let Some(family) = self.family {
            if family != spec.family {
                *spec = match family {
                    MeanFamily::LogSumExp => MeanFunctionSpec::log_sum_exp(1.0),
                    MeanFamily::Power => MeanFunctionSpec::power(1.0, 2.0),
                    MeanFamily::Delta11 => MeanFunctionSpec::delta11(1.0, 2.0),
                    MeanFamily::Delta12 => MeanFunctionSpec::delta12(1.0, 2.0),
                    MeanFamily::LpNorm => MeanFunctionSpec::lp_norm(2.0),
                };
            }
        }
        if let Some(s) = self.sigma {
            spec.sigma = s;
        }
        if let Some(l) = self.l {
            spec.l = l;
        }
        if let Some(t) = self.theta {
            spec.weights = Weights::Explicit(t);
        }
    }
}

/// Applies solver keys; returns false for keys it does not know.
fn algo_key(cfg: &mut AlgoConfig, mean: &mut MeanParams, key: &str, value: &str) -> CliResult<bool> {
    match key {
        "gamma" => cfg.gamma = num(key, value)?,
        "beta" => cfg.beta = num(key, value)?,
        "max_iters" => cfg.max_iters = Some(num(key, value)?),
        "residual_tol" => cfg.residual_tol = num(key, value)?,
        "rel_change_tol" => cfg.rel_change_tol = num(key, value)?,
        "qbar" => cfg.qbar = Some(num(key, value)?),
        "stomp_threshold" => cfg.stomp_threshold = num(key, value)?,
        "rng_seed" => cfg.rng_seed = num(key, value)?,
        "noisy_stopping" => {
            if boolean(key, value)? {
                cfg.residual_tol = 0.0;
                cfg.rel_change_tol = AlgoConfig::noisy().rel_change_tol;
            }
        }
        _ => return mean.take(key, value),
    }
    Ok(true)
}

fn unknown(key: &str) -> CliError {
    CliError::Config(format!("unknown setting `{key}`"))
}

pub fn apply_algo_settings(settings: &Settings, cfg: &mut AlgoConfig) -> CliResult<()> {
    let mut mean = MeanParams::default();
    for (k, v) in settings {
        if !algo_key(cfg, &mut mean, k, v)? {
            return Err(unknown(k));
        }
    }
    mean.apply(&mut cfg.mean_function);
    cfg.validate()?;
    Ok(())
}

pub fn apply_experiment_settings(settings: &Settings, cfg: &mut ExperimentConfig) -> CliResult<()> {
    let mut mean = MeanParams::default();
    for (k, v) in settings {
        let (k, v) = (k.as_str(), v.as_str());
        match k {
            "scale" => match v {
                "desk" => {}
                "full" => {
                    let full = ExperimentConfig::full_scale();
                    cfg.n = full.n;
                    cfg.m = full.m;
                    cfg.k_grid = full.k_grid;
                    cfg.trials = full.trials;
                }
                _ => return Err(bad(k, v)),
            },
            "n" => cfg.n = num(k, v)?,
            "m" => cfg.m = num(k, v)?,
            "k_grid" => cfg.k_grid = parse_usize_list(k, v)?,
            "trials" => cfg.trials = num(k, v)?,
            "algorithms" => cfg.algorithms = parse_algorithms(v)?,
            "base_seed" | "seed" => cfg.base_seed = num(k, v)?,
            "output" => cfg.output_path = PathBuf::from(v),
            "noise_std" => cfg.noise_std = num(k, v)?,
            "record_timing" => cfg.record_timing = boolean(k, v)?,
            "threads" => cfg.threads = Some(num(k, v)?),
            _ => {
                if !algo_key(&mut cfg.algo_config, &mut mean, k, v)? {
                    return Err(unknown(k));
                }
            }
        }
    }
    mean.apply(&mut cfg.algo_config.mean_function);
    cfg.validate()
}

pub fn apply_demo_settings(settings: &Settings, cfg: &mut DemoConfig) -> CliResult<()> {
    let mut mean = MeanParams::default();
    for (k, v) in settings {
        let (k, v) = (k.as_str(), v.as_str());
        match k {
            "n" => cfg.n = num(k, v)?,
            "kappa" => cfg.kappa = num(k, v)?,
            "wavelet" => cfg.wavelet.family = WaveletFamily::from_str(v).map_err(|e| CliError::Config(e.to_string()))?,
            "levels" => cfg.wavelet.levels = num(k, v)?,
            "algorithm" => cfg.algorithm = Algorithm::from_str(v).map_err(|e| CliError::Config(e.to_string()))?,
            "seed" => cfg.seed = num(k, v)?,
            "signal" => {
                cfg.signal = match v {
                    "piecewise" | "piecewise_smooth" => SignalKind::PiecewiseSmooth,
                    "sparse" | "sparse_coefficients" => SignalKind::SparseCoefficients,
                    _ => return Err(bad(k, v)),
                }
            }
            "orthonormal_debug" => cfg.orthonormal_debug = boolean(k, v)?,
            _ => {
                if !algo_key(&mut cfg.algo_config, &mut mean, k, v)? {
                    return Err(unknown(k));
                }
            }
        }
    }
    mean.apply(&mut cfg.algo_config.mean_function);
    cfg.algo_config.validate()?;
    Ok(())
}
