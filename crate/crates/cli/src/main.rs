//! `rmflab`: batch driver for the experiments in `rmflab-core`.
//!
//! Exit status: 0 on success or help, 1 for usage errors, 2 for resource
//! and runtime failures.

mod args;
mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::Output;
use config::Config;
use error::CliError;

fn dispatch(cfg: &Config, command: Command) -> Result<Output, CliError> {
    match command {
        Command::Sieve(c) => commands::sieve(cfg, c),
        Command::Count(c) => commands::count(cfg, c),
        Command::Clt(c) => commands::clt(cfg, c),
        Command::FluctPoly(c) => commands::fluct_poly(cfg, c),
        Command::FluctShort(c) => commands::fluct_short(cfg, c),
        Command::Slowvar(c) => commands::slowvar(cfg, c),
        Command::Gaussmax(c) => commands::gaussmax(cfg, c),
        Command::VerifyScales(c) => commands::verify_scales(cfg, c),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let out = match cfg.opt(cli.workers, "workers")? {
        Some(0) => return Err(CliError::Usage("--workers must be at least 1".into())),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::Runtime(format!("cannot start {w} workers: {e}")))?
            .install(|| dispatch(&cfg, cli.command))?,
        None => dispatch(&cfg, cli.command)?,
    };
    if let Some(p) = &out.summary_path {
        output::emit(Some(p), &output::json_text(&out.summary))?;
    }
    output::emit(out.out.as_deref(), &out.primary)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rmflab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
