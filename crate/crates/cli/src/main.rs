use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = insight_cli::Cli::parse();
    match insight_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
