//! Command-line front end: config parsing, dispatch and CSV/JSON output.

pub mod args;
pub mod axis;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod validate;
pub mod value;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use axis::parse_axis;
pub use config::{parse_config, Bindings};
pub use error::{CliError, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_OK, EXIT_VALIDATION};
pub use validate::{ClosedLoop, GeneratorModel};
pub use value::parse_value;

/// Runs the tool and returns its exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_model(args, &ClosedLoop, stdout, stderr)
}

/// As [`run`], with `validate` checking against `model`.
pub fn run_with_model<I, T>(
    args: I,
    model: &dyn GeneratorModel,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_CONFIG;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    match commands::execute(&cli.command, model, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "duplex {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
