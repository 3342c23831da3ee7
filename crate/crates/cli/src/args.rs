use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use khl_core::{QuadRule, DEFAULT_MAX_SWEEPS, DEFAULT_TOL};

use crate::error::CliError;

const SEED_ENV: &str = "KHL_SEED";
const DEFAULT_SEED: u64 = 7;

/// Spectral reports over Hankel and shifted Hilbert sections and the
/// discretized kernels of a rank-one resolvent pair.
///
/// Output is deterministic for a fixed config and seed; pass `--timing` to
/// trade that for a wall-clock field in the JSON envelope.
#[derive(Debug, Parser)]
#[command(name = "khl", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for fan-out scans; 1 forces serial execution.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Record elapsed wall-clock seconds in the JSON envelope.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of one operator, with fill metrics over its natural
    /// spectral interval.
    Spectrum(SpectrumArgs),
    /// Even/odd block decomposition of a Hankel section against its
    /// closed-form blocks, plus the block-spectrum union mismatch.
    ParityCheck(ParityArgs),
    /// Randomized rank-one trace-formula trials with spectral-shift and
    /// interlacing diagnostics.
    SsfDemo(SsfArgs),
    /// Squared Hilbert-Schmidt norm of the difference kernel across growing
    /// truncation lengths, with the fitted log slope.
    Divergence(DivergenceArgs),
    /// Projection-difference vs difference-kernel quadratic forms over
    /// smeared test-function pairs.
    Crosscheck(CrosscheckArgs),
    /// Fill metrics across a list of section sizes.
    FillScan(FillScanArgs),
    /// Largest spectral atom across growing section sizes.
    AcProbe(AcProbeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorKind {
    /// Resolvent kernel sinh(min) * exp(-max).
    A0,
    /// Its rank-one partner cosh(min) * exp(-max).
    A1,
    /// Oscillatory difference kernel at coupling mu.
    Kmu,
    /// Shifted Hilbert matrix 1 / (i + j + 1 - p).
    Hilbert,
    /// Alternating-sign shifted Hilbert matrix.
    HilbertAlt,
    /// Hankel section of the arc-symbol Fourier coefficients.
    HankelSymbol,
}

/// Quadrature rule flag: `midpoint` or `glc:PANELS:ORDER`.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleArg(pub QuadRule);

impl FromStr for RuleArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "midpoint" {
            return Ok(RuleArg(QuadRule::Midpoint));
        }
        if let Some(rest) = s.strip_prefix("glc:") {
            let mut it = rest.splitn(2, ':');
            let panels = it.next().and_then(|t| t.parse::<usize>().ok());
            let order = it.next().and_then(|t| t.parse::<usize>().ok());
            if let (Some(panels @ 1..), Some(order @ 1..)) = (panels, order) {
                return Ok(RuleArg(QuadRule::glc(panels, order)));
            }
        }
        Err(format!(
            "expected 'midpoint' or 'glc:PANELS:ORDER' with positive counts, got '{s}'"
        ))
    }
}

#[derive(Debug, clap::Args)]
pub struct SpectrumArgs {
    #[arg(long, value_enum)]
    pub operator: OperatorKind,
    /// Shift of the Hilbert-matrix variants.
    #[arg(long)]
    pub p: Option<f64>,
    /// Coupling of the difference kernel, in (0, 1).
    #[arg(long)]
    pub mu: Option<f64>,
    /// Truncation length of the kernel operators.
    #[arg(long = "L")]
    pub length: Option<f64>,
    /// Section size or grid size.
    #[arg(long = "N")]
    pub size: usize,
    /// Quadrature rule for the kernel operators (default midpoint).
    #[arg(long)]
    pub rule: Option<RuleArg>,
    /// Eigensolver convergence threshold, relative to the Frobenius norm.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
    pub max_sweeps: usize,
}

#[derive(Debug, clap::Args)]
pub struct ParityArgs {
    /// Half size: the decomposed Hankel section has size 2N.
    #[arg(long = "N")]
    pub half: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
    pub max_sweeps: usize,
}

#[derive(Debug, clap::Args)]
pub struct SsfArgs {
    /// Matrix dimension per trial.
    #[arg(long = "N", default_value_t = 20)]
    pub dim: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Degree of the random polynomial test functions.
    #[arg(long, default_value_t = 5)]
    pub degree: usize,
    /// Master seed; falls back to KHL_SEED, then 7.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, clap::Args)]
pub struct DivergenceArgs {
    #[arg(long)]
    pub mu: f64,
    /// Truncation lengths, comma separated, at least 3, increasing.
    #[arg(long = "sizes", value_delimiter = ',', required = true)]
    pub lengths: Vec<f64>,
}

#[derive(Debug, clap::Args)]
pub struct CrosscheckArgs {
    #[arg(long)]
    pub mu: f64,
    #[arg(long = "L")]
    pub length: f64,
    #[arg(long = "N")]
    pub size: usize,
    #[arg(long)]
    pub rule: Option<RuleArg>,
}

#[derive(Debug, clap::Args)]
pub struct FillScanArgs {
    #[arg(long, value_enum)]
    pub operator: OperatorKind,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long = "L")]
    pub length: Option<f64>,
    #[arg(long)]
    pub rule: Option<RuleArg>,
    /// Section sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
    pub max_sweeps: usize,
}

#[derive(Debug, clap::Args)]
pub struct AcProbeArgs {
    /// Section family: hankel-symbol, hilbert, or kmu.
    #[arg(long, value_enum)]
    pub operator: OperatorKind,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long = "L")]
    pub length: Option<f64>,
    /// Section sizes, comma separated, at least 3, increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
}

/// Flag, then environment, then the fixed default.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw.parse::<u64>().map_err(|_| {
            CliError::Config(format!(
                "{SEED_ENV} must be an unsigned integer, got '{raw}'"
            ))
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}
