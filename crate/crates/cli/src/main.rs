mod args;
mod commands;
mod config;
mod failure;
mod game;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{BenchCommand, Cli, Command};
use commands::SweepKind;
use failure::{CliResult, Failure};

fn run(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Failure::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    let file = cli.config.as_deref().map(config::load_file).transpose()?;
    let file = file.as_ref();
    match cli.command {
        Command::TrainTree(a) => commands::train_tree(config::merge(a, file)?),
        Command::Exact(a) => commands::exact(config::merge(a, file)?),
        Command::Attribute(a) => commands::attribute(config::merge(a, file)?),
        Command::Diag(a) => commands::diag(config::merge(a, file)?),
        Command::Bench(b) => match b {
            BenchCommand::SweepSamples(a) => commands::sweep(config::merge(a, file)?, SweepKind::Samples),
            BenchCommand::SweepNoise(a) => commands::sweep(config::merge(a, file)?, SweepKind::Noise),
            BenchCommand::Condition(a) => commands::condition(config::merge(a, file)?),
            BenchCommand::Scatter(a) => commands::scatter(config::merge(a, file)?),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
