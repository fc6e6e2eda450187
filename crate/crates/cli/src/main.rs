use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = slicetype_cli::Cli::parse();
    match slicetype_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
