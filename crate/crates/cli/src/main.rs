use std::process::ExitCode;

use clap::Parser;
use gausscap_cli::args::Cli;
use gausscap_cli::commands;
use gausscap_cli::config::{Settings, JOBS_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Settings::resolve(&cli, std::env::var(JOBS_ENV).ok().as_deref())
        .and_then(|s| commands::run(&cli, &s));
    match result {
        Ok(status) => ExitCode::from(status.code()),
        Err(err) => {
            eprintln!("gausscap: {err}");
            ExitCode::from(err.status.code())
        }
    }
}
