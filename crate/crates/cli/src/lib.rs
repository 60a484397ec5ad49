//! Command-line front end for the duopoly solver.
//!
//! Exit codes: 0 success, 1 verification failure, 2 bad input, 3 I/O failure.

pub mod args;
pub mod axis;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod verify;

use std::fs;
use std::path::Path;

pub use args::{Cli, Command};
pub use error::CliError;
pub use verify::{ClosedForm, Solver};

use commands::Output;
use config::{parse_config, Overrides, RunConfig};

/// Merges defaults, the config file and flags.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            Overrides::from_entries(&parse_config(&text)?)?
        }
        None => Overrides::default(),
    };
    file.merge(cli.common.overrides()?).resolve()
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    execute_with(cli, &ClosedForm)
}

/// Runs `cli` against `solver` and writes the result.
pub fn execute_with<S: Solver>(cli: &Cli, solver: &S) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    let output = match &cli.command {
        Command::Equilibrium => commands::equilibrium(&cfg, solver)?,
        Command::BestResponse { pm, qm } => commands::best_response(&cfg, solver, pm, *qm)?,
        Command::Sweep { x, y } => commands::sweep(&cfg, solver, x, y.as_deref())?,
        Command::Verify { samples } => commands::verify_with(&cfg, solver, *samples)?,
        Command::Simulate {
            p_low,
            q_low,
            p_eval,
        } => commands::simulate(&cfg, *p_low, *q_low, *p_eval)?,
        Command::Welfare => commands::welfare(&cfg, solver)?,
    };
    emit(&output, cli.common.out.as_deref())?;
    match output.failure {
        Some(msg) => Err(CliError::Verification(msg)),
        None => Ok(()),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn emit(output: &Output, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            write_file(path, &output.body)?;
            if let Some(meta) = &output.sidecar {
                write_file(&path.with_extension("meta.json"), meta)?;
            }
            Ok(())
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}
