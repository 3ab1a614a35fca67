use std::process::ExitCode;

use clap::Parser;
use curve_recon_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if !out.message.is_empty() {
                eprintln!("{}", out.message);
            }
            ExitCode::from(if out.flagged { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
