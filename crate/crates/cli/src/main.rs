use clap::error::ErrorKind;
use clap::Parser;
use std::io::Write;

use framekit_cli::{execute, usage_error_report, Cli, RunReport, EXIT_INPUT};

fn emit(report: &RunReport) {
    let text = serde_json::to_string_pretty(report).expect("reports serialize");
    // A closed stdout (e.g. `| head`) is not worth a panic.
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            eprint!("{e}");
            let msg = e.kind().as_str().unwrap_or("invalid command line").to_string();
            emit(&usage_error_report(&msg));
            std::process::exit(EXIT_INPUT);
        }
    };
    let (report, code) = execute(&cli);
    emit(&report);
    std::process::exit(code);
}
