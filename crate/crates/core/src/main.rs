use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use uniform_lefschetz::cli::{error_report, execute, write_outputs, RunConfig};

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let run = execute(&cfg).and_then(|out| write_outputs(&cfg, &out).map(|_| out));
    match run {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.render().as_bytes());
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("{}", serde_json::to_string_pretty(&error_report(&e)).unwrap_or_else(|_| e.to_string()));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
