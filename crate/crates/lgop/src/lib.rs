//! Command-line driver for `lgop-core`: published-table reproduction, the
//! acceptance suite, parameter sweeps and CSV/JSON output.

pub mod commands;
pub mod config;
pub mod error;
pub mod functions;
pub mod grid;
pub mod output;
pub mod reference;
pub mod suite;

use clap::Parser;

pub use config::{Cli, Command, RunConfig};
pub use error::{CliError, CliResult};

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match RunConfig::from_cli(cli).and_then(|cfg| commands::run(&cfg)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("lgop: {e}");
            e.exit_code()
        }
    }
}
