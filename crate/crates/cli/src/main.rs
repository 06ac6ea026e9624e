use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "quasifix",
    version,
    about = "Fixed points of enriched contractions in quasi-normed spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config and write its artifacts to --out.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads for sampling and multi-start probes.
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: Option<u16>,
    },
    /// List the builtin norms and maps.
    Catalog,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, jobs } => {
            let outcome = quasifix_cli::run(&config, &out, jobs.map(usize::from));
            println!("{}", outcome.summary);
            ExitCode::from(outcome.exit_code as u8)
        }
        Command::Catalog => {
            print!("{}", quasifix_cli::list_catalog());
            ExitCode::SUCCESS
        }
    }
}
