use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use output::{Failure, Outcome};

#[derive(Parser, Debug)]
#[command(name = "liesym", version, about = "Exact Lie point symmetry analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that generators are symmetries (exact zero residual).
    Verify {
        #[command(flatten)]
        target: Target,
        /// A generator such as "xi_t=0; xi_x=1; eta=0". Repeatable.
        #[arg(long)]
        generator: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the determining equations at a rational binding.
    Find {
        #[command(flatten)]
        target: Target,
        /// Highest power of t in the polynomial factor of each coefficient.
        #[arg(long, default_value_t = liesym::solver::DEFAULT_DEGREE_CAP)]
        degree_cap: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Reduce by delta3..delta6, or by time with `--generator time`.
    Reduce {
        #[command(flatten)]
        target: Target,
        /// One of delta3, delta4, delta5, delta6 or time.
        #[arg(long)]
        generator: String,
        /// The constant c in 2 d/dt + c u d/du; defaults to R for hpz and 0 otherwise.
        #[arg(long, allow_hyphen_values = true)]
        time_multiplier: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Classify a symmetry algebra from a basis file, a fixture or a solver run.
    Classify {
        #[command(flatten)]
        target: Target,
        /// JSON file with `variables`, `dependent` and `generators`.
        #[arg(long, conflicts_with = "equation")]
        basis: Option<PathBuf>,
        #[arg(long, default_value_t = liesym::solver::DEFAULT_DEGREE_CAP)]
        degree_cap: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run the whole pipeline and emit one document.
    Report {
        #[arg(long, default_value = commands::REPORT_BINDING)]
        params: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Target {
    /// Registry name: hpz, heat, reduced-3.2, reduced-3.5, reduced-3.7, reduced-3.9, stationary-2.6.
    #[arg(long)]
    equation: Option<String>,
    /// Built-in generator set (`paper` or `reference`).
    #[arg(long)]
    fixture: Option<String>,
    /// Parameter binding, for example R=5,S=4,V=1,W=1.
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn run(cli: Cli) -> Result<(Outcome, Common), Failure> {
    Ok(match cli.command {
        Command::Verify { target, generator, common } => (
            commands::verify(
                target.equation.as_deref(),
                target.fixture.as_deref(),
                &generator,
                target.params.as_deref(),
            )?,
            common,
        ),
        Command::Find { target, degree_cap, common } => {
            (commands::find(target.equation.as_deref(), target.params.as_deref(), degree_cap)?, common)
        }
        Command::Reduce { target, generator, time_multiplier, common } => (
            commands::reduce(
                target.equation.as_deref(),
                &generator,
                target.params.as_deref(),
                time_multiplier.as_deref(),
            )?,
            common,
        ),
        Command::Classify { target, basis, degree_cap, common } => (
            commands::classify(
                target.equation.as_deref(),
                target.fixture.as_deref(),
                basis.as_deref(),
                target.params.as_deref(),
                degree_cap,
            )?,
            common,
        ),
        Command::Report { params, common } => (commands::report(&params)?, common),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (outcome, common) = match run(cli) {
        Ok(r) => r,
        Err(f) => {
            eprintln!("error: {}", f.message());
            return ExitCode::from(f.code());
        }
    };
    let mut body = match common.format {
        Format::Json => serde_json::to_string_pretty(&outcome.json).expect("report serializes"),
        Format::Text => outcome.text.trim_end().to_string(),
    };
    body.push('\n');
    match &common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::from(outcome.code)
}
