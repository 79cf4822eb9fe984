use std::process::ExitCode;

use clap::Parser;

use linrec_cli::{execute, Cli};

fn main() -> ExitCode {
    // clap itself exits 2 on malformed command lines
    let cli = Cli::parse();
    match execute(cli) {
        Ok(out) => {
            if !out.text.is_empty() {
                println!("{}", out.text);
            }
            ExitCode::from(out.status as u8)
        }
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
