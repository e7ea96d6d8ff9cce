use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    nucsp::cli::execute(nucsp::cli::Cli::parse())
}
