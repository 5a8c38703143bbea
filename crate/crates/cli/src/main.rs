use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dtam_cli::config::{
    apply_algo_settings, apply_demo_settings, apply_experiment_settings, parse_override, read_settings, Settings,
};
use dtam_cli::demo::{signal_demo, DemoConfig};
use dtam_cli::experiment::{aggregate_csv, phase_transition, ExperimentConfig};
use dtam_cli::report::{parse_deltas, theory_report, RicSource, TheoryArgs};
use dtam_cli::{CliError, CliResult};
use dtam_core::io::{read_matrix, read_vector, write_vector};
use dtam_core::matrix::{norm2, residual};
use dtam_core::meanfun::MeanFamily;
use dtam_core::theory::ric_bruteforce;
use dtam_core::{solve, AlgoConfig, Algorithm, MeanFunctionSpec, RecoveryProblem};

#[derive(Parser)]
#[command(name = "dtam", version, about = "Sparse recovery experiments: DTAM, PGROTP, OMP, SP, StOMP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SettingsArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one setting, e.g. `--set gamma=0.2`. Repeatable; applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl SettingsArgs {
    fn collect(&self, extra: Vec<(&str, Option<String>)>) -> CliResult<Settings> {
        let mut s = match &self.config {
            Some(p) => read_settings(p)?,
            None => Vec::new(),
        };
        for o in &self.overrides {
            s.push(parse_override(o)?);
        }
        s.extend(extra.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))));
        Ok(s)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Success frequency against sparsity over seeded random instances; writes CSV.
    PhaseTransition {
        #[command(flatten)]
        settings: SettingsArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Comma list or inclusive range start:stop:step.
        #[arg(long)]
        k_grid: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        /// Comma list of dtam, pgrotp, omp, sp, stomp, or `all`.
        #[arg(long)]
        algorithms: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Per-trial rows; aggregates are written next to it with an `_aggregate` suffix.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Use n = 4000, m = 800, k = 5..400, 100 trials (hours of CPU time).
        #[arg(long)]
        full_scale: bool,
        /// Write 0 for time_ms so repeated runs produce identical files.
        #[arg(long)]
        no_timing: bool,
    },
    /// Recover a sparse vector from a matrix file and a measurement file.
    Recover {
        #[command(flatten)]
        settings: SettingsArgs,
        /// Sensing matrix (.csv or .bin).
        #[arg(long)]
        matrix: PathBuf,
        /// Measurements (.csv or .bin, one row or column).
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "dtam")]
        algorithm: String,
        /// Ground truth, for reporting the relative error.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Where to write the recovered vector.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Wavelet-domain recovery of a synthetic signal; reports the SNR.
    SignalDemo {
        #[command(flatten)]
        settings: SettingsArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        kappa: Option<f64>,
        /// haar or db2.
        #[arg(long)]
        wavelet: Option<String>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        algorithm: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Use an exactly sparse coefficient vector instead of the piecewise-smooth signal.
        #[arg(long)]
        sparse: bool,
        /// Square orthonormal B with k = n; recovery must be exact.
        #[arg(long)]
        orthonormal_debug: bool,
    },
    /// Print δ*, g(γ), δ(γ) and, given RICs, the convergence constants.
    Theory {
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, default_value_t = 0.4)]
        beta: f64,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// log_sum_exp, power, delta11, delta12 or lp_norm.
        #[arg(long, default_value = "log_sum_exp")]
        mean_function: String,
        #[arg(long)]
        mean_sigma: Option<f64>,
        #[arg(long)]
        mean_l: Option<f64>,
        /// Restricted isometry constants `δ_k,δ_2k,δ_3k`.
        #[arg(long, conflicts_with = "matrix")]
        deltas: Option<String>,
        /// Enumerate the RICs of this matrix instead.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Seed for the random starts used to estimate λ*.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Restricted isometry constants of a small matrix by enumerating supports.
    Ric {
        #[arg(long)]
        matrix: PathBuf,
        /// Comma-separated orders.
        #[arg(long, default_value = "1,2,3")]
        k: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn read_input_matrix(path: &Path) -> CliResult<dtam_core::DenseMatrix> {
    read_matrix(path).map_err(config_err)
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::PhaseTransition {
            settings,
            n,
            m,
            k_grid,
            trials,
            algorithms,
            seed,
            output,
            full_scale,
            no_timing,
        } => {
            let s = settings.collect(vec![
                ("scale", full_scale.then(|| "full".to_string())),
                ("n", n.map(|v| v.to_string())),
                ("m", m.map(|v| v.to_string())),
                ("k_grid", k_grid),
                ("trials", trials.map(|v| v.to_string())),
                ("algorithms", algorithms),
                ("base_seed", seed.map(|v| v.to_string())),
                ("output", output.map(|p| p.display().to_string())),
                ("record_timing", no_timing.then(|| "false".to_string())),
            ])?;
            let mut cfg = ExperimentConfig::default();
            apply_experiment_settings(&s, &mut cfg)?;
            let result = phase_transition(&cfg)?;
            print!("{}", aggregate_csv(&result.cells));
            eprintln!(
                "wrote {} and {}",
                cfg.output_path.display(),
                cfg.aggregate_path().display()
            );
        }
        Command::Recover {
            settings,
            matrix,
            y,
            k,
            algorithm,
            truth,
            output,
        } => {
            let mut cfg = AlgoConfig::default();
            apply_algo_settings(&settings.collect(Vec::new())?, &mut cfg)?;
            let algorithm: Algorithm = algorithm.parse().map_err(config_err)?;
            let a = read_input_matrix(&matrix)?;
            let yv = read_vector(&y).map_err(config_err)?;
            let truth = truth.map(|p| read_vector(&p).map_err(config_err)).transpose()?;
            let problem = RecoveryProblem::with_truth(a, yv, k, truth, None).map_err(config_err)?;
            let trace = solve(algorithm, &problem, &cfg)?;
            let res = norm2(&residual(&problem.a, &trace.final_x, &problem.y)?);
            println!("algorithm   {algorithm}");
            println!("stop_reason {}", trace.stop_reason.name());
            println!("iterations  {}", trace.iterations());
            println!("residual    {res:e}");
            println!("support     {:?}", dtam_core::SupportSet::support_of(&trace.final_x).indices());
            if let Some(err) = problem.relative_error(&trace.final_x) {
                println!("rel_error   {err:e}");
            }
            match output {
                Some(p) => write_vector(&p, &trace.final_x)?,
                None => {
                    for v in &trace.final_x {
                        println!("{v}");
                    }
                }
            }
        }
        Command::SignalDemo {
            settings,
            n,
            kappa,
            wavelet,
            levels,
            algorithm,
            seed,
            sparse,
            orthonormal_debug,
        } => {
            let s = settings.collect(vec![
                ("n", n.map(|v| v.to_string())),
                ("kappa", kappa.map(|v| v.to_string())),
                ("wavelet", wavelet),
                ("levels", levels.map(|v| v.to_string())),
                ("algorithm", algorithm),
                ("seed", seed.map(|v| v.to_string())),
                ("signal", sparse.then(|| "sparse".to_string())),
                ("orthonormal_debug", orthonormal_debug.then(|| "true".to_string())),
            ])?;
            let mut cfg = DemoConfig::default();
            apply_demo_settings(&s, &mut cfg)?;
            println!("{}", signal_demo(&cfg)?);
        }
        Command::Theory {
            gamma,
            beta,
            k,
            mean_function,
            mean_sigma,
            mean_l,
            deltas,
            matrix,
            seed,
        } => {
            if !(gamma > 0.0 && gamma <= 1.0) || !(0.0..1.0).contains(&beta) || k == 0 {
                return Err(CliError::Config("need 0 < gamma <= 1, 0 <= beta < 1 and k >= 1".into()));
            }
            let family: MeanFamily = mean_function.parse().map_err(config_err)?;
            let sigma = mean_sigma.unwrap_or(1.0);
            let mut spec = match family {
                MeanFamily::LogSumExp => MeanFunctionSpec::log_sum_exp(sigma),
                MeanFamily::Power => MeanFunctionSpec::power(sigma, 2.0),
                MeanFamily::Delta11 => MeanFunctionSpec::delta11(sigma, 2.0),
                MeanFamily::Delta12 => MeanFunctionSpec::delta12(sigma, 2.0),
                MeanFamily::LpNorm => MeanFunctionSpec::lp_norm(2.0),
            };
            if let Some(l) = mean_l {
                spec.l = l;
            }
            spec.validate(k).map_err(config_err)?;
            let rics = match (deltas, matrix) {
                (Some(d), _) => parse_deltas(&d)?,
                (None, Some(p)) => RicSource::Matrix(read_input_matrix(&p)?),
                (None, None) => RicSource::None,
            };
            let args = TheoryArgs {
                gamma,
                beta,
                k,
                mean_function: spec,
                rics,
                seed,
            };
            print!("{}", theory_report(&args)?.to_table());
        }
        Command::Ric { matrix, k } => {
            let a = read_input_matrix(&matrix)?;
            for order in dtam_cli::config::parse_usize_list("k", &k)? {
                println!("delta_{order} {:.12}", ric_bruteforce(&a, order)?);
            }
        }
    }
    Ok(())
}
