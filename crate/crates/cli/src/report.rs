//! Table of the theoretical constants for a parameter choice.

use std::fmt::Write as _;

use dtam_core::meanfun::{g_gamma, GGammaBundle};
use dtam_core::theory::{
    constants_bundle, eval_g_hat, find_delta_gamma, find_delta_star, pgrotp_constants, ric_bruteforce,
    PgrotpConstants,
};
use dtam_core::{DenseMatrix, MeanFunctionSpec, TheoryConstants};

use crate::error::{CliError, CliResult};

/// Where the restricted isometry constants come from.
#[derive(Debug, Clone, PartialEq)]
pub enum RicSource {
    None,
    Given { delta_k: f64, delta_2k: f64, delta_3k: f64 },
    /// Enumerated from the matrix; orders whose enumeration is too large are skipped.
    Matrix(DenseMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryArgs {
    pub gamma: f64,
    pub beta: f64,
    pub k: usize,
    pub mean_function: MeanFunctionSpec,
    pub rics: RicSource,
    pub seed: u64,
}

impl Default for TheoryArgs {
    fn default() -> Self {
        Self {
            gamma: 0.1,
            beta: 0.4,
            k: 10,
            mean_function: MeanFunctionSpec::default(),
            rics: RicSource::None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryReport {
    pub delta_star: f64,
    pub g_hat_at_delta_star: f64,
    pub g: GGammaBundle,
    pub delta_gamma: f64,
    /// `(order, δ)` for every order that could be enumerated.
    pub rics: Vec<(usize, f64)>,
    pub constants: Option<TheoryConstants>,
    pub pgrotp: Option<PgrotpConstants>,
}

pub fn theory_report(args: &TheoryArgs) -> CliResult<TheoryReport> {
    let delta_star = find_delta_star();
    let g = g_gamma(&args.mean_function, args.k, args.gamma, args.seed)?;
    let delta_gamma = find_delta_gamma(g.g)?;
    let rics: Vec<(usize, f64)> = match &args.rics {
        RicSource::None => Vec::new(),
        RicSource::Given {
            delta_k,
            delta_2k,
            delta_3k,
        } => vec![(args.k, *delta_k), (2 * args.k, *delta_2k), (3 * args.k, *delta_3k)],
        RicSource::Matrix(a) => {
            let mut out = Vec::new();
            for order in [args.k, 2 * args.k, 3 * args.k] {
                if order > a.cols() {
                    break;
                }
                match ric_bruteforce(a, order) {
                    Ok(d) => out.push((order, d)),
                    Err(dtam_core::Error::TooManySubsets { .. }) => break,
                    Err(e) => return Err(e.into()),
                }
            }
            out
        }
    };
    let (constants, pgrotp) = if let [(_, dk), (_, d2k), (_, d3k)] = rics[..] {
        if d3k < 1.0 {
            (
                Some(constants_bundle(dk, d2k, d3k, g.g, args.beta)?),
                Some(pgrotp_constants(dk, d2k, d3k)?),
            )
        } else {
            (None, None)
        }
    } else {
        (None, None)
    };
    Ok(TheoryReport {
        delta_star,
        g_hat_at_delta_star: eval_g_hat(delta_star)?,
        g,
        delta_gamma,
        rics,
        constants,
        pgrotp,
    })
}

impl TheoryReport {
    pub fn to_table(&self) -> String {
        let mut t = String::new();
        let mut row = |name: &str, value: String| {
            writeln!(t, "{name:<14} {value}").expect("writing to a String");
        };
        row("delta_star", format!("{:.12}", self.delta_star));
        row("G_hat(d*)", format!("{:.3e}", self.g_hat_at_delta_star));
        row("g(gamma)", format!("{:.12}", self.g.g));
        row("lambda_star", format!("{:.6}", self.g.lambda_star));
        row("delta(gamma)", format!("{:.12}", self.delta_gamma));
        for (order, d) in &self.rics {
            row(&format!("delta_{order}"), format!("{d:.12}"));
        }
        if let Some(c) = &self.constants {
            row("C1", format!("{:.6}", c.c1));
            row("C2", format!("{:.6}", c.c2));
            row("rho_tilde", format!("{:.6}", c.rho_tilde));
            row("rho", format!("{:.6}", c.rho));
            row("C_beta", format!("{:.6}", c.c_beta));
            row("beta_max", format!("{:.6}", c.beta_max));
            row("valid", c.valid.to_string());
        }
        if let Some(p) = &self.pgrotp {
            row("rho_hat", format!("{:.6}", p.rho_hat));
            row("C_hat", format!("{:.6}", p.c_hat));
            row("pgrotp_valid", p.valid.to_string());
        }
        t
    }
}

/// Parses `"dk,d2k,d3k"`.
pub fn parse_deltas(s: &str) -> CliResult<RicSource> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(format!("bad delta list `{s}`: {e}")))?;
    match v[..] {
        [delta_k, delta_2k, delta_3k] => Ok(RicSource::Given {
            delta_k,
            delta_2k,
            delta_3k,
        }),
        _ => Err(CliError::Config(format!("expected three deltas, got `{s}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_report_has_delta_star() {
        let r = theory_report(&TheoryArgs::default()).unwrap();
        assert!((0.270..=0.274).contains(&r.delta_star));
        assert!(r.to_table().contains("delta_star"));
        assert!(r.constants.is_none());
    }

    #[test]
    fn l2_mean_gives_gamma() {
        let args = TheoryArgs {
            mean_function: MeanFunctionSpec::lp_norm(2.0),
            ..TheoryArgs::default()
        };
        let r = theory_report(&args).unwrap();
        assert_eq!(r.g.g, 0.1);
        assert!(r.to_table().contains("g(gamma)       0.100000000000"));
    }

    #[test]
    fn matrix_rics() {
        let args = TheoryArgs {
            k: 1,
            rics: RicSource::Matrix(DenseMatrix::identity(4)),
            mean_function: MeanFunctionSpec::lp_norm(2.0),
            gamma: 1.0,
            beta: 0.0,
            ..TheoryArgs::default()
        };
        let r = theory_report(&args).unwrap();
        assert_eq!(r.rics.len(), 3);
        assert!(r.constants.unwrap().valid);
    }

    #[test]
    fn delta_parsing() {
        assert!(matches!(parse_deltas("0.1,0.2,0.3").unwrap(), RicSource::Given { .. }));
        assert!(parse_deltas("0.1,0.2").is_err());
        assert!(parse_deltas("a,b,c").is_err());
    }
}
