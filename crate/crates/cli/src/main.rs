//! `unseenkit`: estimate how many unseen features future samples will reveal.
//!
//! Exit codes: 0 success, 2 usage error (malformed command line), 3 data
//! error (unreadable/invalid inputs or infeasible settings), 4 numeric or
//! convergence error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use unseenkit_core::baselines::sbb_posterior_unseen;
use unseenkit_core::ebayes::{fit_sbb, fit_sbsp, FitConfig};
use unseenkit_core::harness::{
    run_benchmark, run_coverage, BenchmarkConfig, CoverageConfig, Method, TrainSize,
};
use unseenkit_core::params::{FitMeta, ParamsDoc};
use unseenkit_core::sbsp::{posterior_unseen, posterior_unseen_rare, sample_dataset};
use unseenkit_core::specfun::DiscretePosterior;
use unseenkit_core::{zipf_generate, BinaryFeatureMatrix, Error as CoreError, ZipfConfig};

#[derive(Parser)]
#[command(
    name = "unseenkit",
    version,
    about = "Unseen-feature extrapolation for presence/absence data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelKind {
    Sbsp,
    Sbb,
}

#[derive(Subcommand)]
enum Command {
    /// Fit model hyperparameters by maximizing the feature-count likelihood.
    Fit {
        /// Dataset in the sparse sample-lines format.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        model: ModelKind,
        /// Multi-start count for the simplex search.
        #[arg(long, default_value_t = 10)]
        starts: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output parameter document (JSON).
        #[arg(long)]
        out: PathBuf,
    },
    /// Posterior prediction of the unseen-feature count at a horizon.
    Predict {
        /// Parameter document produced by `fit`.
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Number of additional samples to extrapolate to.
        #[arg(long)]
        horizon: u64,
        /// Predict features appearing exactly this many times instead.
        #[arg(long)]
        rare: Option<u64>,
        /// Also report a central credible interval at this level.
        #[arg(long)]
        ci: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a synthetic dataset from fitted sbsp parameters.
    Sample {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a Zipf benchmark dataset.
    Zipf {
        #[arg(long)]
        xi: f64,
        #[arg(long)]
        kmax: u64,
        #[arg(long)]
        l: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replicated train/extrapolate benchmark over competing methods.
    Evaluate {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated methods: sbsp, sbb, jackknife:J (J=1..4),
        /// gt:none|binomial|poisson.
        #[arg(long)]
        methods: String,
        /// Training size: an integer count or a fraction like 0.1.
        #[arg(long)]
        train: String,
        #[arg(long)]
        replicates: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Score the rare-feature problem at this prevalence.
        #[arg(long)]
        rare: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Also report a per-row central credible interval at this level.
        #[arg(long)]
        ci: Option<f64>,
        /// Add leave-one-out refit rows for stability bands.
        #[arg(long, default_value_t = false)]
        loo: bool,
    },
    /// Credible-interval calibration sweep for the Bayesian methods.
    Coverage {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        train: u64,
        #[arg(long)]
        replicates: u32,
        /// Comma-separated credible levels in (0,1).
        #[arg(long)]
        alpha_grid: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

enum CliError {
    Data(String),
    Numeric(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Numeric(_) | CoreError::TruncationBudget { .. } => {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> CliResult<BinaryFeatureMatrix> {
    let text = read_text(path)?;
    let parsed = BinaryFeatureMatrix::parse_sparse(&text)?;
    if parsed.duplicates_collapsed > 0 {
        eprintln!(
            "warning: collapsed {} duplicate feature id(s) in {}",
            parsed.duplicates_collapsed,
            path.display()
        );
    }
    Ok(parsed.matrix)
}

fn read_params(path: &Path) -> CliResult<ParamsDoc> {
    Ok(ParamsDoc::from_json(&read_text(path)?)?)
}

/// Everything `predict` knows about the posterior law, flattened to JSON.
#[derive(Serialize)]
struct Prediction {
    model: &'static str,
    n: u64,
    k: u64,
    horizon: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    rare: Option<u64>,
    family: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    failures: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    success: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate: Option<f64>,
    estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ci: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lo: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hi: Option<u64>,
}

fn cmd_fit(input: &Path, model: ModelKind, starts: u32, seed: u64, out: &Path) -> CliResult<()> {
    let matrix = read_matrix(input)?;
    if matrix.is_empty() {
        return Err(CliError::Data(format!(
            "{} holds no samples",
            input.display()
        )));
    }
    let counts = matrix.counts(matrix.len())?;
    let config = FitConfig {
        starts,
        seed,
        ..FitConfig::default()
    };
    let doc = match model {
        ModelKind::Sbsp => {
            let fit = fit_sbsp(&counts, &config)?;
            let meta = FitMeta {
                loglik: fit.loglik,
                n: counts.n,
                k: counts.k,
                starts,
                converged: fit.converged,
            };
            ParamsDoc::sbsp(&fit.params, Some(&meta))
        }
        ModelKind::Sbb => {
            let fit = fit_sbb(&counts, &config)?;
            let meta = FitMeta {
                loglik: fit.loglik,
                n: counts.n,
                k: counts.k,
                starts,
                converged: fit.converged,
            };
            ParamsDoc::sbb(&fit.params, Some(&meta))
        }
    };
    write_text(out, &doc.to_json())
}

fn cmd_predict(
    params: &Path,
    input: &Path,
    horizon: u64,
    rare: Option<u64>,
    ci: Option<f64>,
    out: &Path,
) -> CliResult<()> {
    let doc = read_params(params)?;
    let matrix = read_matrix(input)?;
    if matrix.is_empty() {
        return Err(CliError::Data(format!(
            "{} holds no samples",
            input.display()
        )));
    }
    let counts = matrix.counts(matrix.len())?;
    let law = match (&doc, rare) {
        (ParamsDoc::Sbsp { .. }, None) => {
            posterior_unseen(&doc.as_sbsp()?, counts.n, counts.k, horizon)?
        }
        (ParamsDoc::Sbsp { .. }, Some(r)) => {
            posterior_unseen_rare(&doc.as_sbsp()?, counts.n, counts.k, horizon, r)?
        }
        (ParamsDoc::Sbb { .. }, None) => sbb_posterior_unseen(&doc.as_sbb()?, counts.n, horizon)?,
        (ParamsDoc::Sbb { .. }, Some(_)) => {
            return Err(CliError::Data(
                "rare-feature prediction needs an sbsp parameter document".to_string(),
            ));
        }
    };
    let interval = match ci {
        None => None,
        Some(alpha) => Some(law.central_interval(alpha)?),
    };
    let (family, failures, success, rate) = match law {
        DiscretePosterior::NegativeBinomial { r, p } => {
            ("negative_binomial", Some(r), Some(p), None)
        }
        DiscretePosterior::Poisson { rate } => ("poisson", None, None, Some(rate)),
    };
    let prediction = Prediction {
        model: doc.model(),
        n: counts.n,
        k: counts.k,
        horizon,
        rare,
        family,
        failures,
        success,
        rate,
        estimate: law.mean(),
        ci,
        lo: interval.map(|(lo, _)| lo.value),
        hi: interval.map(|(_, hi)| hi.value),
    };
    let mut text = serde_json::to_string_pretty(&prediction)
        .map_err(|e| CliError::Numeric(format!("cannot serialize prediction: {e}")))?;
    text.push('\n');
    write_text(out, &text)
}

fn cmd_sample(params: &Path, n: u64, seed: u64, out: &Path) -> CliResult<()> {
    let doc = read_params(params)?;
    let sbsp = doc
        .as_sbsp()
        .map_err(|_| CliError::Data("sampling needs an sbsp parameter document".to_string()))?;
    let matrix = sample_dataset(&sbsp, n, seed)?;
    write_text(out, &matrix.to_sparse_text())
}

fn cmd_zipf(xi: f64, kmax: u64, l: u64, seed: u64, out: &Path) -> CliResult<()> {
    let matrix = zipf_generate(&ZipfConfig {
        xi,
        k_max: kmax,
        l,
        seed,
    })?;
    write_text(out, &matrix.to_sparse_text())
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    input: &Path,
    methods: &str,
    train: &str,
    replicates: u32,
    seed: u64,
    rare: Option<u64>,
    out: &Path,
    ci: Option<f64>,
    loo: bool,
) -> CliResult<()> {
    let matrix = read_matrix(input)?;
    let methods: Vec<Method> = methods
        .split(',')
        .map(|tok| tok.trim().parse())
        .collect::<Result<_, _>>()?;
    let train: TrainSize = train.parse()?;
    let mut config = BenchmarkConfig::new(methods, train, replicates, seed);
    config.rare_r = rare;
    config.leave_one_out = loo;
    if let Some(alpha) = ci {
        config.alpha_grid = vec![alpha];
    }
    let report = run_benchmark(&matrix, &config)?;
    write_text(out, &report.to_csv())
}

fn cmd_coverage(
    input: &Path,
    train: u64,
    replicates: u32,
    alpha_grid: &str,
    seed: u64,
    out: &Path,
) -> CliResult<()> {
    let matrix = read_matrix(input)?;
    let alphas: Vec<f64> = alpha_grid
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Data(format!("bad credible level {tok:?}")))
        })
        .collect::<Result<_, _>>()?;
    let config = CoverageConfig {
        train,
        replicates,
        alpha_grid: alphas,
        seed,
        fit_starts: 10,
    };
    let report = run_coverage(&matrix, &config)?;
    write_text(out, &report.to_csv())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Fit {
            input,
            model,
            starts,
            seed,
            out,
        } => cmd_fit(&input, model, starts, seed, &out),
        Command::Predict {
            params,
            input,
            horizon,
            rare,
            ci,
            out,
        } => cmd_predict(&params, &input, horizon, rare, ci, &out),
        Command::Sample {
            params,
            n,
            seed,
            out,
        } => cmd_sample(&params, n, seed, &out),
        Command::Zipf {
            xi,
            kmax,
            l,
            seed,
            out,
        } => cmd_zipf(xi, kmax, l, seed, &out),
        Command::Evaluate {
            input,
            methods,
            train,
            replicates,
            seed,
            rare,
            out,
            ci,
            loo,
        } => cmd_evaluate(
            &input, &methods, &train, replicates, seed, rare, &out, ci, loo,
        ),
        Command::Coverage {
            input,
            train,
            replicates,
            alpha_grid,
            seed,
            out,
        } => cmd_coverage(&input, train, replicates, &alpha_grid, seed, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}
