//! `eigenroots`: eigenpolynomials of exactly-solvable operators and the
//! geometry of their roots, from the command line.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use eigenroots::polyalg::{parse_rational, MIN_PRECISION};
use rug::Rational;

#[derive(Parser, Debug)]
#[command(name = "eigenroots", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print order, degeneracy, j0, d, b and the attainment set.
    Classify(Common),
    /// Compute exact eigenpolynomials, fill the cache and dump coefficients.
    Eigen(Common),
    /// Roots of p_n for each n.
    Roots(Common),
    /// Largest root modulus per n, per-n exponents and the log-log fit.
    Growth(Common),
    /// Roots of the scaled polynomial p_n(n^d z).
    Scaled(WithExponent),
    /// Residuals of the limiting Cauchy-transform equation.
    Cauchy(WithExponent),
    /// Cauchy-modulus margin, root-radius bound, Gauss–Lucas and monotonicity checks.
    Checks(Common),
    /// Interlacing of consecutive real-rooted scaled clouds.
    Interlace(WithExponent),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Operator JSON file.
    #[arg(long)]
    pub operator: PathBuf,
    /// Degree; repeatable.
    #[arg(long = "n")]
    pub n: Vec<usize>,
    /// Comma-separated degrees.
    #[arg(long = "n-grid", value_delimiter = ',')]
    pub n_grid: Vec<usize>,
    #[arg(long, default_value_t = 192)]
    pub precision_bits: u32,
    /// Prefactor c in exponent_n = ln(r_n/c)/ln n.
    #[arg(long)]
    pub prefactor: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Eigenpair cache directory [default: <out>/cache].
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub no_cache: bool,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, default_value_t = 2.0)]
    pub radius_factor: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub imag_tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct WithExponent {
    #[command(flatten)]
    pub common: Common,
    /// Scaling exponent as an exact rational such as 2/3 [default: the operator's d].
    #[arg(long)]
    pub d: Option<String>,
}

impl Common {
    /// Validated degree grid: `--n` values followed by `--n-grid` values.
    pub fn grid(&self) -> Result<Vec<usize>> {
        let grid: Vec<usize> = self.n.iter().chain(&self.n_grid).copied().collect();
        if grid.is_empty() {
            bail!("no degrees given; use --n or --n-grid");
        }
        if grid.contains(&0) || grid.windows(2).any(|w| w[0] >= w[1]) {
            bail!("degrees must be positive and strictly ascending, got {grid:?}");
        }
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision_bits < MIN_PRECISION {
            bail!("--precision-bits must be at least {MIN_PRECISION}");
        }
        if !(self.radius_factor > 1.0 && self.radius_factor.is_finite()) {
            bail!("--radius-factor must exceed 1");
        }
        if self.samples == 0 {
            bail!("--samples must be positive");
        }
        if let Some(c) = self.prefactor {
            if !(c > 0.0 && c.is_finite()) {
                bail!("--prefactor must be positive");
            }
        }
        if self.imag_tol.is_nan() || self.imag_tol < 0.0 {
            bail!("--imag-tol must be non-negative");
        }
        Ok(())
    }

    pub fn cache_dir(&self) -> Option<PathBuf> {
        if self.no_cache {
            None
        } else {
            Some(self.cache.clone().unwrap_or_else(|| self.out.join("cache")))
        }
    }
}

impl WithExponent {
    pub fn exponent(&self) -> Result<Option<Rational>> {
        self.d
            .as_deref()
            .map(|s| parse_rational(s).map_err(anyhow::Error::from))
            .transpose()
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Classify(c) => commands::classify(&c),
        Command::Eigen(c) => commands::eigen(&c),
        Command::Roots(c) => commands::roots(&c),
        Command::Growth(c) => commands::growth(&c),
        Command::Scaled(c) => commands::scaled(&c),
        Command::Cauchy(c) => commands::cauchy(&c),
        Command::Checks(c) => commands::checks(&c),
        Command::Interlace(c) => commands::interlace(&c),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
