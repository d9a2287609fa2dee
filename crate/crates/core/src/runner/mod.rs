//! Experiment configuration, the commands behind the CLI, and their tables.

pub mod checks;
pub mod commands;
pub mod config;
pub mod table;

pub use commands::{run, CommandOutput};
pub use config::{ClassSelector, Command, OutputFormat, RunConfig, SizeList};
pub use table::Table;

use crate::error::Error;

/// Process exit status for a finished command or an error.
pub fn exit_code(result: &crate::Result<CommandOutput>) -> i32 {
    match result {
        Ok(out) if out.failures == 0 => 0,
        Ok(_) => 1,
        Err(Error::Convergence { .. } | Error::Accuracy(_) | Error::NotPositiveDefinite { .. }) => 1,
        Err(_) => 2,
    }
}
