use aol_cli::error::CliError;
use aol_cli::verify::{run_suite, Suite};
use aol_cli::{commands, parse_config};
use clap::{Parser, Subcommand};
use std::path::PathBuf;

/// Periodic-box laboratory for the inviscid alpha-models: simulation,
/// energy-flux defect diagnostics and conservation-threshold tables.
#[derive(Parser)]
#[command(name = "aol", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the configured model and write the energy series plus
    /// snapshots.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Estimate defect-term series on the configured initial fields.
    Defect {
        #[arg(long)]
        config: PathBuf,
    },
    /// Structure functions and scaling-exponent fits of the initial field.
    Structure {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the energy-conservation threshold tables.
    Exponents {
        /// Model name, or `all` for the CSV tables.
        #[arg(long)]
        model: String,
    },
    /// Run an acceptance suite; exits nonzero on failure.
    Verify {
        #[arg(long)]
        suite: String,
    },
}

fn load_config(path: &PathBuf) -> Result<aol_cli::RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read config {}: {e}", path.display()))
    })?;
    parse_config(&text)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config } => {
            let cfg = load_config(&config)?;
            let path = commands::simulate(&cfg)?;
            println!("energy series written to {}", path.display());
            Ok(())
        }
        Command::Defect { config } => {
            let cfg = load_config(&config)?;
            let path = commands::defect(&cfg)?;
            println!("defect series written to {}", path.display());
            Ok(())
        }
        Command::Structure { config } => {
            let cfg = load_config(&config)?;
            let path = commands::structure(&cfg)?;
            println!("structure functions written to {}", path.display());
            Ok(())
        }
        Command::Exponents { model } => {
            print!("{}", commands::exponents(&model)?);
            if !model.eq("all") {
                println!();
            }
            Ok(())
        }
        Command::Verify { suite } => {
            let suite = Suite::from_name(&suite).ok_or_else(|| {
                let names: Vec<&str> = Suite::names().iter().map(|(n, _)| *n).collect();
                CliError::Config(format!(
                    "unknown suite `{suite}`; expected one of {}",
                    names.join(", ")
                ))
            })?;
            let results = run_suite(suite);
            for r in &results {
                println!("{}", r.line());
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                Err(CliError::Verification {
                    failed,
                    total: results.len(),
                })
            } else {
                Ok(())
            }
        }
    }
}

fn main() {
    // AOL_THREADS caps the worker pool
    if let Ok(threads) = std::env::var("AOL_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
