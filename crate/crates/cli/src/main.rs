use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fibermeasure::Property;
use fibermeasure_cli::commands::{self, Method, Output};

#[derive(Parser)]
#[command(name = "fibermeasure", version, about = "Exact analysis of empirical and hidden-variable models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Empirical,
    Local,
}

fn parse_property(s: &str) -> Result<Property, String> {
    Property::from_short_name(s)
        .ok_or_else(|| format!("unknown property {s:?} (expected locality, pi, oi, lambda, weakdet or strongdet)"))
}

#[derive(Subcommand)]
enum Command {
    /// Check hidden-variable properties of a model file.
    Check {
        file: PathBuf,
        /// One of locality, pi, oi, lambda, weakdet, strongdet (default: all six).
        #[arg(long, value_parser = parse_property)]
        property: Option<Property>,
        #[arg(long)]
        json: bool,
    },
    /// Build a strongly deterministic realization.
    Determinize {
        file: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether a local λ-independent model exists, with a certificate.
    Realizability {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// CHSH value of a model with two settings and two outcomes per party.
    Chsh {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Generate a model file.
    Generate {
        #[command(subcommand)]
        kind: Generate,
    },
    /// Run every checker against its characterization and the property relationships.
    Verify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum Generate {
    /// Spin measurements on the two-qubit singlet.
    Singlet {
        /// Comma-separated angles in degrees, e.g. 0,90
        #[arg(long, allow_hyphen_values = true)]
        angles_a: String,
        #[arg(long, allow_hyphen_values = true)]
        angles_b: String,
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_denominator: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out: Output = match cli.command {
        Command::Check { file, property, json } => commands::check_cmd(&file, property, json),
        Command::Determinize { file, method, out, json } => {
            let method = match method {
                MethodArg::Empirical => Method::Empirical,
                MethodArg::Local => Method::Local,
            };
            commands::determinize_cmd(&file, method, &out, json)
        }
        Command::Realizability { file, json } => commands::realizability_cmd(&file, json),
        Command::Chsh { file, json } => commands::chsh_cmd(&file, json),
        Command::Generate { kind: Generate::Singlet { angles_a, angles_b, max_denominator, out, json } } => {
            commands::generate_singlet_cmd(&angles_a, &angles_b, max_denominator, &out, json)
        }
        Command::Verify { file, json } => commands::verify_cmd(&file, json),
    };
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code as u8)
}
