use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = ptgp_cli::Cli::parse();
    ExitCode::from(ptgp_cli::execute(cli))
}
