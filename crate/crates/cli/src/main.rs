use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use mmimo_cli::{help_text, parse_args, parse_config_with, run, CliError};

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn main_inner() -> Result<(), CliError> {
    let inv = parse_args(std::env::args().skip(1))?;
    if inv.help {
        print!("{}", help_text());
        return Ok(());
    }
    let text = match &inv.config_path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Io { path: p.clone(), message: e.to_string() })?,
        None => String::new(),
    };
    let config = parse_config_with(&text, &inv.overrides)?;
    let artifacts = run(&config)?;
    let stdout_err = |e: std::io::Error| CliError::Io { path: "standard output".into(), message: e.to_string() };
    // CSV on stdout pushes the human report to stderr.
    match &config.output {
        Some(path) => {
            write_file(path, &artifacts.csv)?;
            std::io::stdout().write_all(artifacts.report.as_bytes()).map_err(stdout_err)?;
        }
        None => {
            std::io::stdout().write_all(artifacts.csv.as_bytes()).map_err(stdout_err)?;
            eprint!("{}", artifacts.report);
        }
    }
    if let (Some(path), Some(summary)) = (&config.summary_output, &artifacts.summary_csv) {
        write_file(path, summary)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mmimo-power: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
