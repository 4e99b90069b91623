//! `zl`: evaluate and cross-check Laplace transforms of zeta moments.

mod commands;
mod parse;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::Format;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;

#[derive(Debug, Parser)]
#[command(name = "zl", version, about = "Laplace transforms of |zeta(1/2+it)|^2 and |zeta(1/2+it)|^4")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate L_k(s) by one or more methods.
    Eval(EvalArgs),
    /// Evaluate by several methods and report differences from quadrature.
    Compare(EvalArgs),
    /// Fit main-term or Kober coefficients.
    Fit(FitArgs),
    /// Moments I_k(T) of |zeta|^{2k} over [0, T].
    Moments(MomentArgs),
    /// Check the spectral table: partial sums and realness of the spectral sum.
    SpectralCheck(SpectralArgs),
    /// Run a verification suite; exits 2 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Clone)]
pub struct PointArgs {
    /// Points s as `a+bi`; repeat the flag or separate with commas.
    #[arg(long = "s", value_delimiter = ',', allow_hyphen_values = true)]
    pub s: Vec<String>,

    /// Real grid `start:stop:count`, geometric unless --linear.
    #[arg(long)]
    pub grid: Option<String>,

    /// Use an arithmetic grid.
    #[arg(long)]
    pub linear: bool,
}

#[derive(Debug, Args, Clone)]
pub struct TableArg {
    /// Spectral table `kappa,weight`; the built-in synthetic table is used when absent.
    #[arg(long, env = "ZL_SPECTRAL_TABLE")]
    pub table: Option<std::path::PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct EvalArgs {
    /// Moment order, 1 or 2.
    #[arg(long)]
    pub k: u32,

    #[command(flatten)]
    pub points: PointArgs,

    /// Methods: quadrature, romberg, kober (k=1), atkinson (k=1), k0 (k=2), theorem (k=2).
    #[arg(long, value_delimiter = ',', default_value = "quadrature")]
    pub method: Vec<String>,

    /// Absolute tolerance for quadrature.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,

    #[command(flatten)]
    pub table: TableArg,

    /// Main-term coefficients `A,B,C,D,E`; fitted with A, B frozen when absent.
    #[arg(long, value_delimiter = ',', num_args = 5, allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
}

#[derive(Debug, Args, Clone)]
pub struct FitArgs {
    /// `main` (C, D, E with A, B frozen), `main-free` (all five) or `kober`.
    #[arg(long, default_value = "main")]
    pub coeffs: String,

    /// Sigma grid `start:stop:count`.
    #[arg(long, default_value = "1e-3:0.3:24")]
    pub sigma_grid: String,

    #[arg(long)]
    pub linear: bool,

    /// Degree of the Kober polynomial.
    #[arg(long, default_value_t = 3)]
    pub degree: usize,

    /// Seed for a deterministic multiplicative jitter (up to 1%) of the grid.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Clone)]
pub struct MomentArgs {
    #[arg(long)]
    pub k: u32,

    /// Heights T; repeat or separate with commas.
    #[arg(long = "t", value_delimiter = ',')]
    pub t: Vec<f64>,

    /// Grid of heights `start:stop:count`.
    #[arg(long)]
    pub grid: Option<String>,

    #[arg(long)]
    pub linear: bool,
}

#[derive(Debug, Args, Clone)]
pub struct SpectralArgs {
    #[command(flatten)]
    pub table: TableArg,

    /// Exponent C in K^2 log^C K.
    #[arg(long, default_value_t = 3.0)]
    pub c_exponent: f64,
}

#[derive(Debug, Args, Clone)]
pub struct VerifyArgs {
    /// `identities`, `spectral` or `all`.
    #[arg(long, default_value = "identities")]
    pub suite: String,

    /// Threshold for relative residuals.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,

    #[command(flatten)]
    pub table: TableArg,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match commands::run(&cli) {
        Ok(outcome) => {
            let written = outcome.report.write(cli.format, &outcome.config, &mut out);
            if let Err(e) = written.and_then(|()| out.flush()) {
                eprintln!("zl: cannot write output: {e}");
                return ExitCode::from(EXIT_DATA);
            }
            ExitCode::from(if outcome.all_passed { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Err(e) => {
            eprintln!("zl: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
