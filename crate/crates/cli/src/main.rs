use clap::Parser;
use mcmullen_cli::commands::{execute, Cli, CliError, Command};
use std::process::ExitCode;

fn run(cli: Cli) -> Result<(), CliError> {
    if let Command::Serve { addr, data_dir } = &cli.command {
        let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Other(e.to_string()))?;
        return rt
            .block_on(mcmullen_cli::service::serve(addr, data_dir.clone()))
            .map_err(|e| CliError::Other(format!("server failed: {e}")));
    }
    let out = execute(&cli.command, cli.format)?;
    match &cli.out {
        Some(path) => {
            std::fs::write(path, out).map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
