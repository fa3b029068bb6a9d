//! `bottomless` command-line front end.
//!
//! Exit codes: 0 success, 2 domain error, 3 non-convergence (the partial
//! payload is still written), 4 I/O error.

mod commands;
mod documents;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "bottomless", version, about = "Bounds, spectra and level sets of the bottomless sextic potential")]
pub struct Cli {
    /// Write the payload to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Convert between (A, B, C, D) and (alpha, beta, gamma, delta) and classify the regime.
    Params(ParamsArgs),
    /// Lower bound on the ground-state energy.
    Bound(BoundArgs),
    /// Lowest eigenvalues of the finite-difference Hamiltonian on a box.
    Spectrum(SpectrumArgs),
    /// Ground energy over growing boxes and the confinement verdict.
    Scan(ScanArgs),
    /// Equipotential section V = E as CSV polylines.
    Contour(ContourArgs),
    /// Check the closed-form local energy of the gaussian at seeded random points.
    VerifyExact(VerifyArgs),
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("form").required(true))]
pub struct ParamsArgs {
    #[arg(long, num_args = 4, value_names = ["A", "B", "C", "D"], allow_negative_numbers = true, group = "form")]
    from_abcd: Option<Vec<f64>>,
    #[arg(long, num_args = 4, value_names = ["ALPHA", "BETA", "GAMMA", "DELTA"], allow_negative_numbers = true, group = "form")]
    from_greek: Option<Vec<f64>>,
}

/// Potential given either as couplings or as greek parameters.
#[derive(Args, Debug, Clone)]
pub struct CouplingArgs {
    #[arg(long, num_args = 4, value_names = ["A", "B", "C", "D"], allow_negative_numbers = true,
          conflicts_with_all = ["alpha", "beta", "gamma", "delta"])]
    abcd: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Simple,
    Eps,
    Closed0,
    Iterate,
    Oracle,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundFormat {
    Json,
    Table1,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Also sets the energy scale with --sinh-theta/--rho2 (default 1 there).
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "rho2", conflicts_with_all = ["alpha", "beta", "delta"])]
    sinh_theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "sinh_theta")]
    rho2: Option<f64>,
    #[arg(long, value_enum, default_value = "oracle")]
    method: Method,
    /// Member of the epsilon family, for --method eps.
    #[arg(long)]
    eps: Option<f64>,
    /// Starting point of the iteration.
    #[arg(long, default_value_t = 1.0)]
    eta0: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: BoundFormat,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Residual target for each eigenpair.
    #[arg(long, default_value_t = 1e-8)]
    eig_tol: f64,
    #[arg(long, default_value_t = 100)]
    max_restarts: usize,
    /// Seed of the ChaCha8 stream for the starting block.
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Cap on the number of grid unknowns n².
    #[arg(long, default_value_t = 1_000_000)]
    max_unknowns: usize,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    couplings: CouplingArgs,
    /// Box half-width L; the domain is [-L, L]².
    #[arg(long = "box")]
    half_width: f64,
    /// Interior points per axis (odd, at least 31).
    #[arg(long, conflicts_with = "spacing")]
    grid: Option<usize>,
    /// Largest admissible grid spacing; used when --grid is absent.
    #[arg(long, default_value_t = 0.05)]
    spacing: f64,
    #[arg(long, default_value_t = 1)]
    num_eigs: usize,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    couplings: CouplingArgs,
    /// Ascending box half-widths, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    boxes: Vec<f64>,
    /// Same number of points for every box instead of a fixed spacing.
    #[arg(long, conflicts_with = "spacing")]
    grid: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    spacing: f64,
    #[arg(long, default_value_t = 1e-2)]
    scan_tol: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct ContourArgs {
    #[arg(long, num_args = 4, value_names = ["A", "B", "C", "D"], allow_negative_numbers = true, required = true)]
    abcd: Vec<f64>,
    #[arg(long, allow_negative_numbers = true)]
    energy: f64,
    /// Half-width of the square window [-W, W]².
    #[arg(long)]
    window: f64,
    /// Samples per axis.
    #[arg(long, default_value_t = 401)]
    resolution: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Points are drawn uniformly from [-R, R]².
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Finite-difference step of the Laplacian stencil.
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
}

/// Why a command did not finish cleanly.
#[derive(Debug)]
pub enum Failure {
    Domain(String),
    /// Numerical breakdown with nothing to report.
    Numerical(String),
}

impl From<bottomless::Error> for Failure {
    fn from(e: bottomless::Error) -> Self {
        match e {
            bottomless::Error::Factorization(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

/// Payload plus whether every iterative step converged.
pub struct Output {
    pub payload: String,
    pub converged: bool,
}

fn emit(path: Option<&PathBuf>, payload: &str) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut f = File::create(p)?;
            f.write_all(payload.as_bytes())?;
            f.flush()
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(payload.as_bytes())?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Params(a) => commands::params(a),
        Command::Bound(a) => commands::bound(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Scan(a) => commands::scan(a),
        Command::Contour(a) => commands::contour(a),
        Command::VerifyExact(a) => commands::verify_exact(a),
    };
    match result {
        Ok(out) => {
            if let Err(e) = emit(cli.output.as_ref(), &out.payload) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(4);
            }
            if out.converged {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: iteration did not converge; partial result written");
                ExitCode::from(3)
            }
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
