use std::io::Write;

use clap::Parser;
use shifted_fermat_cli::app::{run, Cli};
use shifted_fermat_cli::config::RunConfig;

fn main() {
    let cli = Cli::parse();
    let outcome = run(&cli, &RunConfig::process_env());
    // Broken pipes are not worth a panic.
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    std::process::exit(outcome.exit_code);
}
