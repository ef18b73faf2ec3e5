mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::report::CliError;

/// Tropical fans: balancing, Chow rings, modifications and quasilinearity certificates.
#[derive(Parser, Debug)]
#[command(name = "tropfan", version)]
pub struct Cli {
    /// Print the machine-readable report instead of the summary.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct FanInput {
    /// Fan document (`-` for standard input).
    #[arg(long = "fan", value_name = "PATH")]
    pub fan_flag: Option<String>,
    /// Fan document, as an alternative to `--fan`.
    #[arg(value_name = "FAN")]
    pub fan: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Coeff {
    Z,
    Q,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide a property of a weighted fan.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
    /// Compute an invariant or a derived fan.
    Compute {
        #[command(subcommand)]
        what: ComputeCommand,
    },
    /// Tropical modification along the divisor of a named function.
    Modify {
        #[command(flatten)]
        input: FanInput,
        #[arg(long)]
        pl: String,
    },
    /// Try to present the fan as a modification with the given ray vertical.
    RecognizeModification {
        #[command(flatten)]
        input: FanInput,
        #[arg(long, value_name = "RAYINDEX")]
        direction: usize,
    },
    /// Bergman fan of a matroid.
    Bergman {
        /// Uniform matroid U(r, n).
        #[arg(long, num_args = 2, value_names = ["R", "N"])]
        uniform: Option<Vec<usize>>,
        /// Matroid document.
        #[arg(long, value_name = "PATH")]
        matroid: Option<String>,
    },
    /// Decide quasilinearity and print a certificate.
    Quasilinear {
        #[command(flatten)]
        input: FanInput,
        /// Maximum number of candidate rays to try.
        #[arg(long, default_value_t = tropfan::quasilinear::DEFAULT_BUDGET)]
        budget: u64,
        /// Also write the certificate to this file.
        #[arg(long, value_name = "PATH")]
        cert: Option<String>,
    },
    /// Check a certificate against a fan.
    VerifyCert {
        #[command(flatten)]
        input: FanInput,
        #[arg(long, value_name = "PATH")]
        cert: String,
    },
    /// Search for a lattice isomorphism between two weighted fans.
    Isomorphic {
        #[arg(value_name = "FAN", num_args = 2)]
        fans: Vec<String>,
        #[arg(long, default_value_t = tropfan::polyfan::DEFAULT_ISO_BUDGET)]
        budget: u64,
    },
    /// The bundled example corpus.
    Examples {
        /// Print one example as a fan document.
        #[arg(long)]
        name: Option<String>,
        /// Run every acceptance check.
        #[arg(long)]
        verify_all: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum CheckCommand {
    Balance(FanInput),
    Reduced(FanInput),
    Irreducible(FanInput),
    Local(FanInput),
    Poincare {
        #[command(flatten)]
        input: FanInput,
        /// Also check every star fan.
        #[arg(long)]
        star: bool,
        #[arg(long, value_enum)]
        coeff: Option<Coeff>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ComputeCommand {
    Minkowski {
        #[command(flatten)]
        input: FanInput,
        #[arg(long)]
        k: usize,
    },
    Chow {
        #[command(flatten)]
        input: FanInput,
        #[arg(long, value_enum)]
        coeff: Option<Coeff>,
    },
    Divisor {
        #[command(flatten)]
        input: FanInput,
        #[arg(long)]
        pl: String,
    },
    Star {
        #[command(flatten)]
        input: FanInput,
        /// Ray indices of the cone.
        #[arg(long, value_delimiter = ',')]
        cone: Vec<usize>,
    },
    Product {
        #[arg(value_name = "FAN", num_args = 2)]
        fans: Vec<String>,
    },
    /// Unimodular refinement, or the stellar subdivision at `--point`.
    Refine {
        #[command(flatten)]
        input: FanInput,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<i64>>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.render(cli.json));
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => 2,
                _ => 1,
            })
        }
    }
}
