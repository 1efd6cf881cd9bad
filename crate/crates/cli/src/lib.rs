//! The `embias` command-line tool and its file formats.
//!
//! - [`embeddings`]: word2vec text embedding files.
//! - [`wordlists`]: sectioned wordlist configuration files.
//! - [`report`]: deterministic JSON and CSV output.
//! - [`parallel`]: worker-independent Monte Carlo sampling.
//! - [`commands`]: the subcommands.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric
//! degeneracy.

pub mod commands;
pub mod embeddings;
pub mod error;
pub mod parallel;
pub mod report;
pub mod wordlists;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use commands::{Cli, Command, Streams};
pub use error::{CliError, CliResult};

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let mut streams = Streams { out, err };
    match commands::execute(&cli, &mut streams) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(streams.err, "error: {e}");
            e.exit_code()
        }
    }
}
