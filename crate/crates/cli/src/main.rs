use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nief_spectra::{run, RunOptions};

#[derive(Parser)]
#[command(name = "nief-spectra", version, about = "Probe spectra of driven four-level schemes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file.
    Run {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Worker threads; results do not depend on it.
        #[arg(long, env = "NIEF_SPECTRA_THREADS")]
        threads: Option<usize>,
        /// Overrides the config seed (selftest only).
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let Command::Run { config, out_dir, threads, seed } = Cli::parse().command;
    ExitCode::from(run(&RunOptions { config, out_dir, threads, seed }))
}
