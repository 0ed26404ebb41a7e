use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use roceval_cli::config::{Cli, Settings};
use roceval_cli::{output, run, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let resolved = cli.command.resolve();
    let result = resolved
        .as_ref()
        .map_err(CliError::clone)
        .and_then(run::run);
    match result {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", outcome.out_dir.join(f).display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("roceval: {} error: {err}", err.kind());
            let dir = match &resolved {
                Ok(s) => s.out_dir(),
                Err(_) => fallback_dir(&cli),
            };
            let path = dir.join("error.json");
            if let Err(e) = output::write_atomic(&path, output::error_json(&err).as_bytes()) {
                eprintln!("roceval: could not write {}: {e}", path.display());
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

/// Output directory when the settings themselves could not be resolved.
fn fallback_dir(cli: &Cli) -> PathBuf {
    let mut s = Settings::default();
    s.output.dir = cli.command.common().out.clone();
    s.out_dir()
}
