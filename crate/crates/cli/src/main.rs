mod args;
mod commands;
mod error;
mod report;
mod sweep;

use clap::Parser;

use args::{Cli, Command};
use commands::finish;
use error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Hannay(args) => finish(commands::run_hannay(&args)?, &args.output),
        Command::Simulate(args) => finish(commands::run_simulate(&args)?, &args.output),
        Command::Berry(args) => finish(commands::run_berry(&args)?, &args.output),
        Command::Spectrum(args) => finish(commands::run_spectrum(&args)?, &args.output),
        Command::Compare(args) => finish(commands::run_compare(&args)?, &args.output),
        Command::Sweep(args) => sweep::run_sweep(&args),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap itself exits with code 2 on usage errors, matching the
    // validation exit code.
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
