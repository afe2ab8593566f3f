//! Command-line front end: JSON instance and front files, solver dispatch,
//! stable exit codes. The `bmfni` binary is a thin wrapper over [`run_cli`].

pub mod args;
pub mod commands;
pub mod error;
pub mod files;

use std::io::Write;

use clap::Parser;

pub use args::Cli;
pub use error::{exit, CliError};

/// Parses `argv`, runs the command and writes its document. Returns the
/// process exit code; failures are reported as JSON on standard error.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build();
    let result = match pool {
        Ok(pool) => pool.install(|| commands::run(&cli.command)),
        Err(e) => Err(CliError::usage(format!("cannot start {} threads: {e}", cli.threads))),
    };
    match result.and_then(emit) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.code
        }
    }
}

fn emit(outcome: commands::Outcome) -> Result<i32, CliError> {
    match &outcome.out {
        Some(path) => {
            let shown = path.display().to_string();
            std::fs::write(path, &outcome.document).map_err(|e| CliError::io(&shown, e))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.document.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))?;
        }
    }
    Ok(outcome.code)
}
