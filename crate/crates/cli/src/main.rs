use std::process::ExitCode;

use clap::Parser;
use gaq_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let code = execute(&cli, &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code as u8)
}
