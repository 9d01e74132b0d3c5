mod args;
mod commands;
mod error;
mod io;

use std::process::ExitCode;

use clap::Parser;

use crate::error::{CliError, EXIT_VALIDATION};

/// Cap the worker pool from SCALEFISHER_THREADS, if set.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SCALEFISHER_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Validation(format!("SCALEFISHER_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Validation(format!("cannot configure {threads} threads: {e}")))
}

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    let result = configure_threads().and_then(|_| commands::run(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            debug_assert!(code >= EXIT_VALIDATION);
            ExitCode::from(code)
        }
    }
}
