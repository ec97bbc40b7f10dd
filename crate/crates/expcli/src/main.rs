use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qpspec_cli::{list_experiments, run_path, Overrides};

#[derive(Parser)]
#[command(name = "qpspec", version, about = "Run numerical experiments on quasi-periodic Schrödinger operators")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (default: from the config, else `results`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Root seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run { config: PathBuf },
    /// List the available experiments.
    List,
}

fn print_listing() {
    for (name, doc) in list_experiments() {
        println!("{name:<20} {doc}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        None | Some(Command::List) => {
            print_listing();
            ExitCode::SUCCESS
        }
        Some(Command::Run { config }) => {
            let overrides = Overrides {
                threads: cli.threads,
                out: cli.out,
                seed: cli.seed,
            };
            match run_path(&config, &overrides) {
                Ok(summary) => {
                    println!("wrote {} rows to {}", summary.rows, summary.csv.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
