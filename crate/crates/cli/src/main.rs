use std::process::ExitCode;

use clap::Parser;
use sweep_cli::{execute, Cli, Env};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli, &Env::from_process(), &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sweep: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
