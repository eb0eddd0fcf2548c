mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use twistor_core::ScalarMode;

/// Algebras on three imaginary units, their representations and twistor triangles.
#[derive(Debug, Parser)]
#[command(name = "twistor", version)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Numerical tolerance (relative to the scale of the data)
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Scalar backend for algebra-level computations [default: float; exact for selftest]
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,

    /// Seed for all randomised steps
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the main output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn scalar_mode(&self, default: ScalarMode) -> ScalarMode {
        match self.mode {
            Some(ModeArg::Exact) => ScalarMode::Exact,
            Some(ModeArg::Float) => ScalarMode::Float,
            None => default,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(allow_hyphen_values = true)]
    pub beta: String,
    #[arg(allow_hyphen_values = true)]
    pub gamma: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the algebra with parameters alpha, beta, gamma
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        /// Also count representation classes on R^{4n}
        #[arg(long)]
        n: Option<usize>,
    },
    /// Build a canonical representation on R^{4n} and write it as a matrix file
    Rep {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: usize,
        /// Multiplicity of the first summand (rho_1 for spherical, rho_8 for cylindrical)
        #[arg(long)]
        k: Option<usize>,
        /// Pick a faithful representation
        #[arg(long, conflicts_with = "k")]
        faithful: bool,
    },
    /// Analyse the triangle formed by three matrices from a file
    Triangle {
        path: PathBuf,
    },
    /// Construct a fiber triple for the component labelled by k
    Fiber {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Write the triple (g1, g2, g3) and its context as JSON
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Run the acceptance suite
    Selftest,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
