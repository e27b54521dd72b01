//! Command-line front end for nlgeo: Werner and Bell-diagonal sweeps, the
//! Bell-diagonal grid, one-off measures, isotropic tables and validation.
//!
//! Every command produces a [`Table`] which is written once, after all
//! computation has finished, as CSV or JSON.

mod args;
mod commands;
mod error;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};

pub use args::{BdInput, Cli, Command, RunConfig};
pub use commands::{execute, linspace, Outcome};
pub use error::CliError;
pub use table::{Cell, Format, Table};

/// Runs a command and writes its table to the configured destination.
///
/// A `validate` run with failed checks still writes its report and then
/// returns [`CliError::Validation`].
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let outcome = execute(cfg)?;
    match &cfg.output_path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            outcome.table.write(cfg.format, &mut w)?;
            w.flush()?;
        }
        None => outcome.table.write(cfg.format, io::stdout().lock())?,
    }
    if outcome.failures > 0 {
        return Err(CliError::Validation(outcome.failures));
    }
    Ok(outcome)
}
