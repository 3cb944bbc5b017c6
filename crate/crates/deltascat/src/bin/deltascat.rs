use std::process::ExitCode;

use clap::Parser;
use deltascat::cli::{error_json, init_threads, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| run(&cli)).and_then(|outcome| {
        match &cli.out {
            Some(path) => std::fs::write(path, &outcome.body)
                .map_err(|e| deltascat::Error::Input(format!("{}: {e}", path.display())))?,
            None => print!("{}", outcome.body),
        }
        eprintln!("{}", outcome.summary);
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
