use std::process::ExitCode;

use clap::Parser;
use nlgeo_cli::{Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match RunConfig::try_from(cli).and_then(|cfg| nlgeo_cli::run(&cfg)) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nlgeo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
