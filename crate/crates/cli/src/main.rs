mod args;
mod run;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use run::{CliError, EXIT_VALIDATION};

fn configure_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var("QPD_THREADS") else {
        return Ok(());
    };
    let n = text
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage("QPD_THREADS", format!("'{text}' is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::usage("QPD_THREADS", e))
}

fn dispatch(cli: &Cli) -> Result<u8, CliError> {
    configure_threads()?;
    let mut stdout = io::stdout().lock();
    match &cli.command {
        Command::Eval(a) => run::cmd_eval(a, &mut stdout)?,
        Command::Scan(a) => run::cmd_scan(a, &mut stdout)?,
        Command::SphereMap(a) => run::cmd_sphere_map(a, &mut stdout)?,
        Command::Validate(a) => {
            if !run::cmd_validate(a, &mut stdout)? {
                return Ok(EXIT_VALIDATION);
            }
        }
        Command::Ledger(a) => run::cmd_ledger(a, &mut stdout)?,
    }
    stdout.flush().map_err(|e| CliError::io("stdout", e))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qpd: {e}");
            ExitCode::from(e.code)
        }
    }
}
