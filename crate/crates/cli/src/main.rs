mod args;
mod commands;
mod manifest;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use rowswap::Config;

use args::Cli;
use commands::{dispatch, write_outputs, CliError};
use manifest::Manifest;

fn run(cli: Cli) -> Result<(), CliError> {
    let jobs = usize::from(cli.jobs);
    let (base, command) = match (&cli.from_manifest, cli.command) {
        (Some(_), Some(_)) => return Err(CliError::Usage("--from-manifest replaces the subcommand".into())),
        (None, None) => return Err(CliError::Usage("a subcommand is required (see --help)".into())),
        (Some(path), None) => {
            let m = Manifest::load(path)?;
            (m.config.parse::<Config>()?, m.command)
        }
        (None, Some(cmd)) => {
            let base = match &cli.config {
                Some(path) => Config::load(path)?,
                None => Config::from_env()?,
            };
            (base, cmd)
        }
    };
    let outputs = dispatch(&base, &command, jobs)?;
    match command.out() {
        Some(dir) => {
            write_outputs(dir, &outputs)?;
            let names = outputs.files.iter().map(|(n, _)| n.clone()).collect();
            let manifest = Manifest::new(&command, base.to_config_string(), names);
            std::fs::write(dir.join(Manifest::file_name(&command)), manifest.to_toml()?)
                .map_err(|e| CliError::Internal(format!("cannot write manifest: {e}")))?;
        }
        None => {
            let (_, body) = &outputs.files[0];
            std::io::stdout().write_all(body.as_bytes()).map_err(|e| CliError::Internal(format!("stdout: {e}")))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
